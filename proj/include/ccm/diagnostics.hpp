#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ccm/graph.hpp"

namespace ccm {

enum class Outcome { OutOfSpace, NonChanging, Accepted, Rejected, LazyHold };

struct OutcomeTally {
  std::uint64_t out_of_space = 0;
  std::uint64_t non_changing = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::uint64_t lazy_hold = 0;

  void record(Outcome o) {
    switch (o) {
      case Outcome::OutOfSpace: ++out_of_space; break;
      case Outcome::NonChanging: ++non_changing; break;
      case Outcome::Accepted: ++accepted; break;
      case Outcome::Rejected: ++rejected; break;
      case Outcome::LazyHold: ++lazy_hold; break;
    }
  }
  std::uint64_t total() const { return out_of_space + non_changing + accepted + rejected + lazy_hold; }
  /// Proposals that were CDM-preserving swaps (changing or not).
  std::uint64_t valid() const { return non_changing + accepted + rejected; }

  friend bool operator==(const OutcomeTally&, const OutcomeTally&) = default;
};

struct TraceSnapshot {
  std::uint64_t iteration = 0;
  double assortativity = 0.0;
  OutcomeTally tally;
};

/// Periodic record of a chain: iterations strictly increase, tallies are cumulative.
struct ChainTrace {
  std::vector<TraceSnapshot> snapshots;
};

inline void write_trace_csv(std::ostream& os, const ChainTrace& trace) {
  os << "iteration,assortativity,out_of_space,non_changing,accepted,rejected,lazy_hold\n";
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : trace.snapshots) {
    os << s.iteration << ',';
    if (std::isnan(s.assortativity))
      os << "nan";
    else
      os << s.assortativity;
    os << ',' << s.tally.out_of_space << ',' << s.tally.non_changing << ',' << s.tally.accepted << ','
       << s.tally.rejected << ',' << s.tally.lazy_hold << '\n';
  }
  os.precision(old_precision);
}

/// Pearson correlation of endpoint degrees over the 2m ordered endpoint pairs
/// (each occurrence contributes both orientations, self-loops included).
/// NaN when every endpoint has the same degree.
inline double degree_assortativity(const ColoredMultigraph& g) {
  const std::size_t m = g.num_edges();
  if (m == 0) throw std::invalid_argument("degree assortativity of an empty graph");
  // Both orientations are present, so the x and y marginals coincide.
  double sum = 0.0;
  for (const Edge& e : g.edges()) sum += double(g.degree(e.a)) + double(g.degree(e.b));
  const double mean = sum / double(2 * m);
  double cov = 0.0, var = 0.0;
  for (const Edge& e : g.edges()) {
    const double da = double(g.degree(e.a)) - mean;
    const double db = double(g.degree(e.b)) - mean;
    cov += 2.0 * da * db;
    var += da * da + db * db;
  }
  if (var == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return cov / var;
}

/// Probability that a uniformly drawn ordered pair of distinct occurrences
/// plus orientation coin lands in one color class with the CDM-preserving
/// orientation. Computed from class sizes only.
template <class Scalar = double>
Scalar theta(const ColoredMultigraph& g) {
  const std::uint64_t m = g.num_edges();
  if (m < 2) throw std::invalid_argument("theta needs at least two edges");
  Scalar mono(0), bi(0);
  for (ColorId l = 0; l < g.num_colors(); ++l) {
    for (ColorId r = l; r < g.num_colors(); ++r) {
      const std::uint64_t s = g.class_size(l, r);
      if (s < 2) continue;
      (l == r ? mono : bi) += Scalar(s * (s - 1));
    }
  }
  const Scalar pairs = Scalar(m * (m - 1));
  return mono / pairs + bi / (Scalar(2) * pairs);
}

struct MStatistics {
  double m = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::optional<double>> per_vertex;  // nullopt for isolated vertices
};

/// Fraction of same-color neighbors per vertex and its mean over vertices of
/// positive degree.
inline MStatistics m_statistics(const ColoredMultigraph& g) {
  MStatistics out;
  out.per_vertex.resize(g.num_vertices());
  double sum = 0.0;
  std::size_t counted = 0;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const std::uint32_t d = g.degree(v);
    if (d == 0) continue;
    const double mv = double(g.colored_degree(g.color(v), v)) / double(d);
    out.per_vertex[v] = mv;
    sum += mv;
    ++counted;
  }
  if (counted > 0) out.m = sum / double(counted);
  return out;
}

struct VertexScore {
  VertexId vertex;
  std::optional<double> value;
};

/// The k highest-degree vertices (ties by ascending id) with their M_v.
inline std::vector<VertexScore> top_degree_mv(const ColoredMultigraph& g, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be positive");
  std::vector<VertexId> order(g.num_vertices());
  std::iota(order.begin(), order.end(), VertexId{0});
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](VertexId a, VertexId b) {
                      if (g.degree(a) != g.degree(b)) return g.degree(a) > g.degree(b);
                      return a < b;
                    });
  const MStatistics stats = m_statistics(g);
  std::vector<VertexScore> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({order[i], stats.per_vertex[order[i]]});
  return out;
}

}  // namespace ccm
