#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccm/diagnostics.hpp"
#include "ccm/graph.hpp"
#include "ccm/sampler.hpp"

namespace ccm {

enum class Side : std::uint8_t { A, B };

struct RwcConfig {
  double restart = 0.15;
  std::size_t influencers = 10;
  /// Side per color; empty means map_communities(g).
  std::vector<Side> sides;
  double tolerance = 1e-10;
  std::size_t max_iterations = 100000;
};

class ScoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Side A is the color with the most vertices (lowest id on ties), side B the rest.
inline std::vector<Side> map_communities(const ColoredMultigraph& g) {
  if (g.num_colors() < 2) throw ScoreError("community mapping needs at least two colors");
  std::vector<std::size_t> count(g.num_colors(), 0);
  for (VertexId v = 0; v < g.num_vertices(); ++v) ++count[g.color(v)];
  const auto top = std::max_element(count.begin(), count.end()) - count.begin();
  std::vector<Side> sides(g.num_colors(), Side::B);
  sides[static_cast<std::size_t>(top)] = Side::A;
  return sides;
}

/// Top-k vertices by degree inside one side, ties by ascending id.
inline std::vector<VertexId> side_influencers(const ColoredMultigraph& g, const std::vector<Side>& sides, Side s,
                                              std::size_t k) {
  std::vector<VertexId> members;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (sides[g.color(v)] == s) members.push_back(v);
  const std::size_t take = std::min(k, members.size());
  std::partial_sort(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end(),
                    [&](VertexId a, VertexId b) {
                      if (g.degree(a) != g.degree(b)) return g.degree(a) > g.degree(b);
                      return a < b;
                    });
  members.resize(take);
  return members;
}

struct RwcResult {
  double score = 0.0;
  double p_aa = 0.0, p_ab = 0.0, p_ba = 0.0, p_bb = 0.0;
  std::vector<VertexId> influencers_a, influencers_b;
};

namespace detail {

/// Weighted neighbor lists; a self-loop of multiplicity w contributes weight 2w.
inline std::vector<std::vector<std::pair<VertexId, double>>> weighted_adjacency(const ColoredMultigraph& g) {
  std::vector<std::vector<std::pair<VertexId, double>>> adj(g.num_vertices());
  for (const Edge& e : g.edges()) {
    adj[e.a].push_back({e.b, 1.0});
    adj[e.b].push_back({e.a, 1.0});
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    std::vector<std::pair<VertexId, double>> merged;
    for (const auto& [u, w] : list) {
      if (!merged.empty() && merged.back().first == u)
        merged.back().second += w;
      else
        merged.push_back({u, w});
    }
    list = std::move(merged);
  }
  return adj;
}

/// Probability that a walk from each vertex, killed with probability
/// `restart` per step, first hits the absorbing set at a vertex with
/// indicator 1. Jacobi iteration; the map contracts with factor 1 - restart.
inline std::vector<double> hitting_values(const std::vector<std::vector<std::pair<VertexId, double>>>& adj,
                                          const std::vector<double>& degree, const std::vector<bool>& absorbing,
                                          const std::vector<double>& indicator, const RwcConfig& cfg) {
  const std::size_t n = adj.size();
  std::vector<double> h(n, 0.0), next(n, 0.0);
  for (std::size_t v = 0; v < n; ++v)
    if (absorbing[v]) h[v] = indicator[v];
  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (absorbing[v] || degree[v] == 0.0) {
        next[v] = h[v];
        continue;
      }
      double s = 0.0;
      for (const auto& [u, w] : adj[v]) s += w * h[u];
      next[v] = (1.0 - cfg.restart) * s / degree[v];
      change = std::max(change, std::abs(next[v] - h[v]));
    }
    h.swap(next);
    if (change < cfg.tolerance) return h;
  }
  throw ScoreError("random-walk solver did not converge");
}

}  // namespace detail

/// Random Walk Controversy with restart. A walk starts at a uniform vertex of
/// side X, moves to a neighbor with probability proportional to multiplicity,
/// and with probability `restart` per step jumps back to a fresh uniform start
/// in X. It stops at the first influencer it meets. P_XY is the probability
/// of stopping at an influencer of side Y; RWC = P_AA P_BB - P_AB P_BA.
inline RwcResult rwc(const ColoredMultigraph& g, const RwcConfig& cfg = {}) {
  if (!(cfg.restart > 0.0 && cfg.restart < 1.0)) throw std::invalid_argument("restart must lie in (0, 1)");
  if (cfg.influencers == 0) throw std::invalid_argument("influencer count must be positive");
  const std::vector<Side> sides = cfg.sides.empty() ? map_communities(g) : cfg.sides;
  if (sides.size() != g.num_colors()) throw std::invalid_argument("side map does not cover every color");

  RwcResult r;
  r.influencers_a = side_influencers(g, sides, Side::A, cfg.influencers);
  r.influencers_b = side_influencers(g, sides, Side::B, cfg.influencers);
  if (r.influencers_a.empty() || r.influencers_b.empty()) throw ScoreError("both sides need at least one vertex");

  const std::size_t n = g.num_vertices();
  const auto adj = detail::weighted_adjacency(g);
  std::vector<double> degree(n);
  for (VertexId v = 0; v < n; ++v) degree[v] = g.degree(v);

  std::vector<bool> absorbing(n, false);
  std::vector<double> to_a(n, 0.0), to_b(n, 0.0), to_any(n, 0.0);
  for (VertexId v : r.influencers_a) absorbing[v] = true, to_a[v] = 1.0, to_any[v] = 1.0;
  for (VertexId v : r.influencers_b) absorbing[v] = true, to_b[v] = 1.0, to_any[v] = 1.0;

  const auto ha = detail::hitting_values(adj, degree, absorbing, to_a, cfg);
  const auto hb = detail::hitting_values(adj, degree, absorbing, to_b, cfg);
  const auto hany = detail::hitting_values(adj, degree, absorbing, to_any, cfg);

  auto side_mean = [&](const std::vector<double>& h, Side s) {
    double sum = 0.0;
    std::size_t count = 0;
    for (VertexId v = 0; v < n; ++v)
      if (sides[g.color(v)] == s) sum += h[v], ++count;
    return sum / double(count);
  };
  const double any_a = side_mean(hany, Side::A), any_b = side_mean(hany, Side::B);
  if (any_a <= 0.0 || any_b <= 0.0) throw ScoreError("walks from one side never reach an influencer");
  r.p_aa = side_mean(ha, Side::A) / any_a;
  r.p_ab = side_mean(hb, Side::A) / any_a;
  r.p_ba = side_mean(ha, Side::B) / any_b;
  r.p_bb = side_mean(hb, Side::B) / any_b;
  r.score = r.p_aa * r.p_bb - r.p_ab * r.p_ba;
  return r;
}

enum class Score { Rwc, M };

inline const char* to_string(Score s) { return s == Score::Rwc ? "rwc" : "m"; }

inline Score parse_score(const std::string& s) {
  if (s == "rwc") return Score::Rwc;
  if (s == "m" || s == "M") return Score::M;
  throw std::invalid_argument("unknown score '" + s + "'");
}

inline double evaluate_score(const ColoredMultigraph& g, Score s, const RwcConfig& cfg = {}) {
  return s == Score::Rwc ? rwc(g, cfg).score : m_statistics(g).m;
}

struct SignificanceResult {
  std::string score_name;
  double observed = 0.0;
  std::vector<double> nulls;
  double p_one_sided_ge = 1.0;
  double p_one_sided_le = 1.0;
  double p_two_sided = 1.0;
};

/// Empirical p-values with the +1 correction.
inline void fill_p_values(SignificanceResult& r) {
  const double z = double(r.nulls.size());
  const auto ge = std::count_if(r.nulls.begin(), r.nulls.end(), [&](double x) { return x >= r.observed; });
  const auto le = std::count_if(r.nulls.begin(), r.nulls.end(), [&](double x) { return x <= r.observed; });
  r.p_one_sided_ge = (1.0 + double(ge)) / (z + 1.0);
  r.p_one_sided_le = (1.0 + double(le)) / (z + 1.0);
  r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_one_sided_ge, r.p_one_sided_le));
}

/// Score the observed graph and z null graphs drawn by independent chains.
/// Influencers are recomputed on every null graph.
inline SignificanceResult significance_test(const ColoredMultigraph& g, const ChainConfig& chain, Score score,
                                            std::size_t z, const RwcConfig& cfg = {},
                                            std::size_t parallelism = 1) {
  if (z == 0) throw std::invalid_argument("significance test needs at least one null sample");
  SignificanceResult r;
  r.score_name = to_string(score);
  r.observed = evaluate_score(g, score, cfg);
  ChainConfig quiet = chain;
  quiet.trace = false;
  const Ensemble nulls = sample_ensemble(g, quiet, {z, parallelism, 0});
  r.nulls.reserve(z);
  for (const auto& h : nulls.graphs) r.nulls.push_back(evaluate_score(h, score, cfg));
  fill_p_values(r);
  return r;
}

}  // namespace ccm
