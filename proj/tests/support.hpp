#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ccm/diagnostics.hpp"
#include "ccm/graph.hpp"
#include "ccm/io.hpp"
#include "ccm/sampler.hpp"
#include "ccm/swap.hpp"

namespace ccm::testing {

/// Random multigraph: uniform colors, uniform endpoint pairs (loops allowed if asked).
template <class Rng>
ColoredMultigraph random_graph(std::size_t n, std::size_t m, std::size_t colors, Rng& rng, bool loops = true) {
  std::uniform_int_distribution<ColorId> pick_color(0, ColorId(colors - 1));
  std::vector<ColorId> c(n);
  for (std::size_t v = 0; v < n; ++v) c[v] = v < colors ? ColorId(v) : pick_color(rng);
  ColoredMultigraph g(c, colors);
  std::uniform_int_distribution<VertexId> pick(0, VertexId(n - 1));
  while (g.num_edges() < m) {
    const VertexId a = pick(rng), b = pick(rng);
    if (!loops && a == b) continue;
    g.add_edge(a, b);
  }
  return g;
}

/// Two colors, each intra-color pair drawn with weight `bias` against 1 for cross pairs.
template <class Rng>
ColoredMultigraph planted_assortative(std::size_t n, std::size_t m, double bias, Rng& rng) {
  std::vector<ColorId> c(n);
  for (std::size_t v = 0; v < n; ++v) c[v] = ColorId(v % 2);
  ColoredMultigraph g(c, 2);
  std::uniform_int_distribution<VertexId> pick(0, VertexId(n - 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (g.num_edges() < m) {
    const VertexId a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const double keep = c[a] == c[b] ? 1.0 : 1.0 / bias;
    if (unit(rng) < keep) g.add_edge(a, b);
  }
  return g;
}

inline LabeledGraph from_text(const std::string& colors, const std::string& edges) {
  std::istringstream cs(colors), es(edges);
  return load_graph(cs, es);
}

/// The eight-vertex, two-color example used throughout: vertices 1-5 red,
/// 6-8 blue; vertex 2 has four red neighbors and one blue, vertex 5 three red.
inline LabeledGraph figure_one() {
  return from_text("1 red\n2 red\n3 red\n4 red\n5 red\n6 blue\n7 blue\n8 blue\n",
                   "2 3\n2 3\n2 1\n2 5\n2 6\n4 5\n4 7\n5 1\n3 8\n6 7\n7 8\n1 4\n");
}

/// Two graphs with equal degrees and JCM but different CDMs.
inline std::pair<LabeledGraph, LabeledGraph> figure_two() {
  const std::string colors = "1 red\n2 blue\n3 red\n4 red\n5 red\n";
  return {from_text(colors, "4 1\n5 2\n3 2\n3 4\n"), from_text(colors, "4 2\n5 1\n3 2\n3 4\n")};
}

inline ColoredDegreeMatrix naive_cdm(const ColoredMultigraph& g) {
  ColoredDegreeMatrix c(g.num_colors(), g.num_vertices());
  for (const Edge& e : g.edges()) {
    c.at(g.color(e.b), e.a) += 1;
    c.at(g.color(e.a), e.b) += 1;
  }
  return c;
}

inline std::vector<std::vector<std::uint64_t>> naive_jcm(const ColoredMultigraph& g) {
  std::vector<std::vector<std::uint64_t>> j(g.num_colors(), std::vector<std::uint64_t>(g.num_colors(), 0));
  for (const Edge& e : g.edges()) {
    const ColorId l = g.color(e.a), r = g.color(e.b);
    j[l][r] += 1;
    if (l != r) j[r][l] += 1;
  }
  return j;
}

inline bool same_graph_after(const ColoredMultigraph& g, VertexId u, VertexId v, VertexId x, VertexId y) {
  std::multiset<Edge> before{Edge(u, v), Edge(x, y)}, after{Edge(u, x), Edge(v, y)};
  return before == after;
}

/// Brute-force classification: rebuild the graph with the swap applied and compare.
inline SwapClass brute_classify(const ColoredMultigraph& g, EdgeHandle h1, EdgeHandle h2, VertexId u, VertexId v,
                                VertexId x, VertexId y) {
  ColoredMultigraph h(g.colors(), g.num_colors());
  for (EdgeHandle e = 0; e < g.num_edges(); ++e) {
    if (e == h1 || e == h2) continue;
    h.add_edge(g.edge(e).a, g.edge(e).b);
  }
  h.add_edge(u, x);
  h.add_edge(v, y);
  if (h == g) return SwapClass::NonChangingCdes;
  return naive_cdm(h) == naive_cdm(g) ? SwapClass::ChangingCdes : SwapClass::OutOfSpace;
}

/// Degree assortativity by an explicit list of ordered endpoint pairs.
inline double naive_assortativity(const ColoredMultigraph& g) {
  std::vector<std::pair<double, double>> pairs;
  for (const Edge& e : g.edges()) {
    pairs.push_back({double(g.degree(e.a)), double(g.degree(e.b))});
    pairs.push_back({double(g.degree(e.b)), double(g.degree(e.a))});
  }
  double mx = 0, my = 0;
  for (auto [x, y] : pairs) mx += x, my += y;
  mx /= double(pairs.size());
  my /= double(pairs.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (auto [x, y] : pairs) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

/// Every edge multiset on the vertex set of `g` with the same CDM, counted by
/// direct search over pair multiplicities (no swaps involved).
inline std::size_t count_graphs_with_cdm(const ColoredMultigraph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (VertexId a = 0; a < n; ++a)
    for (VertexId b = a; b < n; ++b) pairs.push_back({a, b});
  ColoredDegreeMatrix need = g.cdm();
  std::size_t found = 0;

  auto fits = [&](VertexId a, VertexId b) {
    if (a == b) return need.at(g.color(a), a) >= 2;
    return need.at(g.color(b), a) >= 1 && need.at(g.color(a), b) >= 1;
  };
  auto take = [&](VertexId a, VertexId b, int sign) {
    if (a == b) {
      need.at(g.color(a), a) -= 2 * sign;
    } else {
      need.at(g.color(b), a) -= sign;
      need.at(g.color(a), b) -= sign;
    }
  };
  std::size_t remaining = g.num_edges();
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (remaining == 0) {
      for (VertexId v = 0; v < n; ++v)
        for (ColorId l = 0; l < g.num_colors(); ++l)
          if (need.at(l, v) != 0) return;
      ++found;
      return;
    }
    if (i == pairs.size()) return;
    const auto [a, b] = pairs[i];
    std::size_t used = 0;
    self(self, i + 1);
    while (fits(a, b)) {
      take(a, b, 1);
      ++used;
      --remaining;
      self(self, i + 1);
    }
    for (; used > 0; --used) {
      take(a, b, -1);
      ++remaining;
    }
  };
  rec(rec, 0);
  return found;
}

}  // namespace ccm::testing
