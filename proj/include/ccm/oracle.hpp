#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "ccm/diagnostics.hpp"
#include "ccm/graph.hpp"
#include "ccm/sampler.hpp"
#include "ccm/swap.hpp"

namespace ccm {

using Rational = boost::multiprecision::cpp_rational;

/// Canonical state encoding: sorted list of (min, max) occurrence pairs.
using StateKey = std::vector<Edge>;

inline StateKey encode(const ColoredMultigraph& g) {
  StateKey key = g.edges();
  std::sort(key.begin(), key.end());
  return key;
}

class AtlasLimitExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every multigraph reachable from a seed graph by changing CDM-preserving
/// swaps, i.e. the whole space of multigraphs sharing its CDM.
struct StateSpaceAtlas {
  std::vector<ColorId> colors;
  std::size_t num_colors = 0;
  std::vector<StateKey> states;
  std::map<StateKey, std::size_t> index;
  /// Distinct targets of changing CDES moves from each state.
  std::vector<std::vector<std::size_t>> moves;
  /// A Sirius proposal (same-class pair, Sirius orientation) leaves the state unchanged.
  std::vector<bool> sirius_self_move;

  std::size_t size() const { return states.size(); }

  ColoredMultigraph graph(std::size_t i) const {
    ColoredMultigraph g(colors, num_colors);
    for (const Edge& e : states[i]) g.add_edge(e.a, e.b);
    return g;
  }

  std::optional<std::size_t> find(const ColoredMultigraph& g) const {
    auto it = index.find(encode(g));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

/// Visit every ordered Sirius proposal of `g` with its probability.
/// `visit(h1, h2, flip, probability)`.
template <class Scalar, class Visit>
void for_each_sirius_proposal(const ColoredMultigraph& g, Visit&& visit) {
  const std::vector<EdgeHandle> active = swappable_occurrences(g);
  if (active.empty()) return;
  const Scalar first = Scalar(1) / Scalar(active.size());
  for (EdgeHandle h1 : active) {
    const auto& cls = g.class_list(g.class_of(g.edge(h1)));
    const Scalar pair = first / Scalar(cls.size() - 1);
    const auto [u, v] = oriented(g, h1);
    for (EdgeHandle h2 : cls) {
      if (h2 == h1) continue;
      if (g.color(u) != g.color(v)) {
        visit(h1, h2, true, pair);
      } else {
        visit(h1, h2, false, pair / Scalar(2));
        visit(h1, h2, true, pair / Scalar(2));
      }
    }
  }
}

template <class Scalar, class Visit>
void for_each_sirius_b_proposal(const ColoredMultigraph& g, Visit&& visit) {
  const std::size_t m = g.num_edges();
  if (m < 2) return;
  const Scalar each = Scalar(1) / (Scalar(m) * Scalar(m - 1) * Scalar(2));
  for (EdgeHandle h1 = 0; h1 < m; ++h1)
    for (EdgeHandle h2 = 0; h2 < m; ++h2) {
      if (h1 == h2) continue;
      visit(h1, h2, false, each);
      visit(h1, h2, true, each);
    }
}

}  // namespace detail

/// Breadth-first closure of `g` under all changing CDES moves.
inline StateSpaceAtlas enumerate_states(const ColoredMultigraph& g, std::size_t limit = 5000) {
  StateSpaceAtlas atlas;
  atlas.colors = g.colors();
  atlas.num_colors = g.num_colors();

  auto intern = [&](StateKey key) {
    auto [it, fresh] = atlas.index.try_emplace(key, atlas.states.size());
    if (fresh) {
      if (atlas.states.size() >= limit)
        throw AtlasLimitExceeded("state space exceeds the limit of " + std::to_string(limit) + " states");
      atlas.states.push_back(std::move(key));
      atlas.moves.emplace_back();
      atlas.sirius_self_move.push_back(false);
    }
    return it->second;
  };

  intern(encode(g));
  for (std::size_t i = 0; i < atlas.states.size(); ++i) {
    const ColoredMultigraph state = atlas.graph(i);
    std::vector<std::size_t> targets;
    for (EdgeHandle h1 = 0; h1 < state.num_edges(); ++h1)
      for (EdgeHandle h2 = h1 + 1; h2 < state.num_edges(); ++h2)
        for (bool flip : {false, true}) {
          const SwapProposal p = make_proposal(state, h1, h2, flip);
          if (p.kind != SwapClass::ChangingCdes) continue;
          ColoredMultigraph next = state;
          apply_swap(next, p);
          targets.push_back(intern(encode(next)));
        }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    atlas.moves[i] = std::move(targets);

    bool self = false;
    detail::for_each_sirius_proposal<double>(state, [&](EdgeHandle h1, EdgeHandle h2, bool flip, double) {
      const SwapClass k = make_proposal(state, h1, h2, flip).kind;
      if (k == SwapClass::NonChangingCdes || k == SwapClass::Skipped) self = true;
    });
    atlas.sirius_self_move[i] = self;
  }
  return atlas;
}

/// Sparse row-stochastic matrix over atlas states.
template <class Scalar>
struct TransitionMatrix {
  std::vector<std::map<std::size_t, Scalar>> rows;

  std::size_t size() const { return rows.size(); }
  Scalar at(std::size_t i, std::size_t j) const {
    auto it = rows[i].find(j);
    return it == rows[i].end() ? Scalar(0) : it->second;
  }
  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Eigen::Index(size()), Eigen::Index(size()));
    for (std::size_t i = 0; i < size(); ++i)
      for (const auto& [j, value] : rows[i]) out(Eigen::Index(i), Eigen::Index(j)) = static_cast<double>(value);
    return out;
  }
};

template <class Scalar>
struct ExactChains {
  TransitionMatrix<Scalar> sirius;
  TransitionMatrix<Scalar> sirius_b;
  Scalar theta{};
  std::vector<Scalar> weights;  ///< unnormalized target weight per state
};

namespace detail {

template <class Scalar, class Target, class ForEach>
TransitionMatrix<Scalar> build_matrix(const StateSpaceAtlas& atlas, const std::vector<Scalar>& weights,
                                      const Target&, ForEach&& for_each) {
  TransitionMatrix<Scalar> P;
  P.rows.resize(atlas.size());
  for (std::size_t i = 0; i < atlas.size(); ++i) {
    const ColoredMultigraph g = atlas.graph(i);
    auto& row = P.rows[i];
    Scalar moved(0);
    for_each(g, [&](EdgeHandle h1, EdgeHandle h2, bool flip, const Scalar& prob) {
      const SwapProposal p = make_proposal(g, h1, h2, flip);
      if (p.kind != SwapClass::ChangingCdes) return;
      ColoredMultigraph h = g;
      apply_swap(h, p);
      const std::size_t j = atlas.index.at(encode(h));
      Scalar acceptance = proposal_ratio<Scalar>(g, p.u, p.v, p.x, p.y) * weights[j] / weights[i];
      if (acceptance > Scalar(1)) acceptance = Scalar(1);
      const Scalar mass = prob * acceptance;
      row[j] += mass;
      moved += mass;
    });
    row[i] = Scalar(1) - moved;
  }
  return P;
}

}  // namespace detail

/// Exact one-step transition matrices of the Sirius and Sirius-B chains: every
/// ordered proposal is weighted by its probability and Metropolis acceptance,
/// with the acceptance ratio evaluated from full state weights.
template <class Scalar, class Target = UniformTarget>
ExactChains<Scalar> exact_transition_matrices(const StateSpaceAtlas& atlas, const Target& target = {}) {
  ExactChains<Scalar> out;
  out.weights.reserve(atlas.size());
  for (std::size_t i = 0; i < atlas.size(); ++i)
    out.weights.push_back(target.template weight<Scalar>(atlas.graph(i)));
  out.sirius = detail::build_matrix<Scalar>(atlas, out.weights, target, [](const ColoredMultigraph& g, auto&& f) {
    detail::for_each_sirius_proposal<Scalar>(g, f);
  });
  out.sirius_b = detail::build_matrix<Scalar>(atlas, out.weights, target, [](const ColoredMultigraph& g, auto&& f) {
    detail::for_each_sirius_b_proposal<Scalar>(g, f);
  });
  const ColoredMultigraph g0 = atlas.graph(0);
  out.theta = g0.num_edges() >= 2 ? theta<Scalar>(g0) : Scalar(0);
  return out;
}

// ---------------------------------------------------------------------------
// Checks

template <class Scalar>
double to_double(const Scalar& s) {
  return static_cast<double>(s);
}

template <class Scalar>
Scalar abs_value(const Scalar& s) {
  return s < Scalar(0) ? Scalar(-s) : s;
}

template <class Scalar>
Scalar max_row_sum_deviation(const TransitionMatrix<Scalar>& P) {
  Scalar worst(0);
  for (const auto& row : P.rows) {
    Scalar sum(0);
    for (const auto& [j, value] : row) sum += value;
    worst = std::max(worst, abs_value(Scalar(sum - Scalar(1))));
  }
  return worst;
}

/// max |PB_ij - theta P_ij| (i != j) and |PB_ii - (1 - theta + theta P_ii)|.
template <class Scalar>
Scalar scalar_peskun_deviation(const ExactChains<Scalar>& c) {
  Scalar worst(0);
  const std::size_t n = c.sirius.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Scalar expected =
          i == j ? Scalar(Scalar(1) - c.theta + c.theta * c.sirius.at(i, i)) : Scalar(c.theta * c.sirius.at(i, j));
      worst = std::max(worst, abs_value(Scalar(c.sirius_b.at(i, j) - expected)));
    }
  return worst;
}

/// Per-class form of the same relation, valid on every instance: a move
/// between states i != j swaps two occurrences of one color class c, and
/// PB_ij = kappa_c P_ij with kappa_c = w_c (|E_c| - 1) m' / (m (m - 1)),
/// where w_c is 1 for monochromatic and 1/2 for bichromatic classes and m'
/// counts occurrences in classes of size >= 2.
template <class Scalar>
Scalar class_peskun_deviation(const StateSpaceAtlas& atlas, const ExactChains<Scalar>& c) {
  if (atlas.size() == 0) return Scalar(0);
  const ColoredMultigraph g = atlas.graph(0);
  const std::uint64_t m = g.num_edges();
  if (m < 2) return Scalar(0);
  std::uint64_t active = 0;
  for (std::size_t cls = 0; cls < g.num_class_slots(); ++cls)
    if (g.class_list(cls).size() >= 2) active += g.class_list(cls).size();
  Scalar worst(0);
  for (std::size_t i = 0; i < atlas.size(); ++i) {
    for (std::size_t j = 0; j < atlas.size(); ++j) {
      if (i == j) continue;
      const Scalar pb = c.sirius_b.at(i, j);
      const Scalar p = c.sirius.at(i, j);
      if (p == Scalar(0) && pb == Scalar(0)) continue;
      StateKey removed;
      std::set_difference(atlas.states[i].begin(), atlas.states[i].end(), atlas.states[j].begin(),
                          atlas.states[j].end(), std::back_inserter(removed));
      if (removed.empty()) return Scalar(1);
      const Edge e = removed.front();
      const ColorId l = g.color(e.a), r = g.color(e.b);
      const std::uint64_t size = g.class_size(l, r);
      Scalar kappa = Scalar(size - 1) * Scalar(active) / (Scalar(m) * Scalar(m - 1));
      if (l != r) kappa /= Scalar(2);
      worst = std::max(worst, abs_value(Scalar(pb - kappa * p)));
    }
  }
  return worst;
}

/// max |pi_i P_ij - pi_j P_ji| for the normalized target weights.
template <class Scalar>
Scalar detailed_balance_deviation(const TransitionMatrix<Scalar>& P, const std::vector<Scalar>& weights) {
  Scalar total(0);
  for (const auto& w : weights) total += w;
  Scalar worst(0);
  for (std::size_t i = 0; i < P.size(); ++i)
    for (const auto& [j, value] : P.rows[i]) {
      const Scalar flow = weights[i] * value / total;
      const Scalar back = weights[j] * P.at(j, i) / total;
      worst = std::max(worst, abs_value(Scalar(flow - back)));
    }
  return worst;
}

/// Stationary vector of P (left eigenvector for eigenvalue 1, normalized).
inline Eigen::VectorXd stationary_vector(const Eigen::MatrixXd& P) {
  const Eigen::Index n = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  return A.fullPivLu().solve(b);
}

/// Second-largest eigenvalue modulus of the lazy chain (I + P) / 2 for a
/// chain reversible with respect to `pi`.
inline double lazy_slem(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
  const Eigen::Index n = P.rows();
  if (n < 2) return 0.0;
  const Eigen::VectorXd root = pi.array().sqrt();
  Eigen::MatrixXd S = root.asDiagonal() * P * root.cwiseInverse().asDiagonal();
  S = 0.5 * (S + S.transpose().eval());
  const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(n, n) + S);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lazy, Eigen::EigenvaluesOnly);
  Eigen::VectorXd moduli = solver.eigenvalues().cwiseAbs();
  std::sort(moduli.data(), moduli.data() + n, std::greater<double>());
  return moduli(1);
}

/// Period of the Sirius move graph (changing moves plus structural self-moves).
/// Assumes strong connectivity; uses BFS levels from state 0.
inline std::uint64_t chain_period(const StateSpaceAtlas& atlas) {
  const std::size_t n = atlas.size();
  if (n == 0) return 0;
  std::vector<std::int64_t> level(n, -1);
  std::deque<std::size_t> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t j : atlas.moves[i])
      if (level[j] < 0) {
        level[j] = level[i] + 1;
        queue.push_back(j);
      }
  }
  std::uint64_t g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (level[i] < 0) continue;
    if (atlas.sirius_self_move[i]) g = std::gcd(g, std::uint64_t{1});
    for (std::size_t j : atlas.moves[i]) {
      if (level[j] < 0) continue;
      const std::int64_t d = level[i] + 1 - level[j];
      g = std::gcd(g, static_cast<std::uint64_t>(d < 0 ? -d : d));
    }
  }
  return g;  // 0 only for a single state without any cycle
}

inline bool strongly_connected(const StateSpaceAtlas& atlas) {
  const std::size_t n = atlas.size();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j : atlas.moves[i])
        if (!seen[j]) {
          seen[j] = true;
          ++reached;
          stack.push_back(j);
        }
    }
    if (reached != n) return false;
  }
  return true;
}

struct VerificationReport {
  std::size_t states = 0;
  bool exact = false;  ///< identities checked in rational arithmetic
  bool irreducible = false;
  bool aperiodicity_condition = false;
  std::uint64_t period = 0;
  double theta = 0.0;
  double row_sum_deviation = 0.0;
  double detailed_balance_sirius = 0.0;
  double detailed_balance_sirius_b = 0.0;
  double scalar_peskun_deviation = 0.0;  ///< informational: exact only for balanced classes
  double class_peskun_deviation = 0.0;
  std::optional<double> stationary_deviation_sirius;
  std::optional<double> stationary_deviation_sirius_b;
  std::optional<double> slem_lazy_sirius;
  std::optional<double> slem_lazy_sirius_b;

  static constexpr double kIdentityTolerance = 1e-12;
  static constexpr double kStationaryTolerance = 1e-10;
  static constexpr double kSpectralTolerance = 1e-9;

  bool aperiodic() const { return period == 1 || states == 1; }
  bool peskun_ordered() const {
    if (!slem_lazy_sirius || !slem_lazy_sirius_b) return true;
    return *slem_lazy_sirius <= *slem_lazy_sirius_b + kSpectralTolerance;
  }
  bool passed() const {
    return irreducible && (!aperiodicity_condition || aperiodic()) &&
           row_sum_deviation <= kIdentityTolerance && detailed_balance_sirius <= kIdentityTolerance &&
           detailed_balance_sirius_b <= kIdentityTolerance && class_peskun_deviation <= kIdentityTolerance &&
           stationary_deviation_sirius.value_or(0.0) <= kStationaryTolerance &&
           stationary_deviation_sirius_b.value_or(0.0) <= kStationaryTolerance && peskun_ordered();
  }
};

namespace detail {

template <class Scalar>
void fill_identities(VerificationReport& r, const StateSpaceAtlas& atlas, const ExactChains<Scalar>& c) {
  r.theta = to_double(c.theta);
  r.row_sum_deviation =
      to_double(std::max(max_row_sum_deviation(c.sirius), max_row_sum_deviation(c.sirius_b)));
  r.detailed_balance_sirius = to_double(detailed_balance_deviation(c.sirius, c.weights));
  r.detailed_balance_sirius_b = to_double(detailed_balance_deviation(c.sirius_b, c.weights));
  r.scalar_peskun_deviation = to_double(scalar_peskun_deviation(c));
  r.class_peskun_deviation = to_double(class_peskun_deviation(atlas, c));
}

}  // namespace detail

/// Numerical check of irreducibility, aperiodicity, stationarity and the
/// Peskun relation between the two chains on a complete atlas. Rational
/// arithmetic is used up to `exact_limit` states; spectral quantities are only
/// computed up to `spectral_limit` states.
template <class Target = UniformTarget>
VerificationReport verify_theorems(const StateSpaceAtlas& atlas, const Target& target = {},
                                   std::size_t exact_limit = 64, std::size_t spectral_limit = 1000) {
  VerificationReport r;
  r.states = atlas.size();
  r.irreducible = strongly_connected(atlas);
  r.aperiodicity_condition = has_aperiodicity_witness(atlas.graph(0));
  r.period = chain_period(atlas);

  const auto chains = exact_transition_matrices<double>(atlas, target);
  if (atlas.size() <= exact_limit) {
    r.exact = true;
    detail::fill_identities(r, atlas, exact_transition_matrices<Rational>(atlas, target));
  } else {
    detail::fill_identities(r, atlas, chains);
  }

  if (atlas.size() <= spectral_limit) {
    Eigen::VectorXd pi(Eigen::Index(atlas.size()));
    for (std::size_t i = 0; i < atlas.size(); ++i) pi(Eigen::Index(i)) = chains.weights[i];
    pi /= pi.sum();
    const Eigen::MatrixXd P = chains.sirius.dense();
    const Eigen::MatrixXd PB = chains.sirius_b.dense();
    r.stationary_deviation_sirius = (stationary_vector(P) - pi).cwiseAbs().maxCoeff();
    r.stationary_deviation_sirius_b = (stationary_vector(PB) - pi).cwiseAbs().maxCoeff();
    r.slem_lazy_sirius = lazy_slem(P, pi);
    r.slem_lazy_sirius_b = lazy_slem(PB, pi);
  }
  return r;
}

/// Graphviz rendering of the changing-CDES move graph.
inline void write_dot(std::ostream& os, const StateSpaceAtlas& atlas) {
  os << "digraph states {\n";
  for (std::size_t i = 0; i < atlas.size(); ++i) {
    os << "  s" << i << " [label=\"";
    for (std::size_t k = 0; k < atlas.states[i].size(); ++k) {
      if (k) os << ' ';
      os << atlas.states[i][k].a << '-' << atlas.states[i][k].b;
    }
    os << "\"];\n";
    if (atlas.sirius_self_move[i]) os << "  s" << i << " -> s" << i << ";\n";
    for (std::size_t j : atlas.moves[i]) os << "  s" << i << " -> s" << j << ";\n";
  }
  os << "}\n";
}

}  // namespace ccm
