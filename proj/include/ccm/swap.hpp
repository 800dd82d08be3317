#pragma once

#include <array>
#include <cassert>
#include <optional>
#include <tuple>
#include <utility>

#include "ccm/graph.hpp"

namespace ccm {

enum class SwapClass {
  ChangingCdes,     ///< preserves the CDM and yields a different multigraph
  NonChangingCdes,  ///< yields the same multigraph
  OutOfSpace,       ///< would change the CDM
  Skipped,          ///< non-changing case the ratio table leaves out ("continue")
};

inline const char* to_string(SwapClass c) {
  switch (c) {
    case SwapClass::ChangingCdes: return "changing";
    case SwapClass::NonChangingCdes: return "non_changing";
    case SwapClass::OutOfSpace: return "out_of_space";
    case SwapClass::Skipped: return "skipped";
  }
  return "?";
}

/// Double edge swap <(u,v),(x,y)> -> <(u,x),(v,y)> on two occurrences.
/// Orientation lives here; the graph stores unordered pairs.
struct SwapProposal {
  EdgeHandle first = 0;
  EdgeHandle second = 0;
  VertexId u = 0, v = 0, x = 0, y = 0;
  SwapClass kind = SwapClass::OutOfSpace;
  double rho = 0.0;  // meaningful for ChangingCdes only

  Edge first_target() const { return Edge(u, x); }
  Edge second_target() const { return Edge(v, y); }
};

/// Endpoints of occurrence `h` ordered so that the lower color comes first
/// (lower vertex id first for monochromatic edges). With this convention two
/// occurrences of one bichromatic class always satisfy c(u) = c(x).
inline std::pair<VertexId, VertexId> oriented(const ColoredMultigraph& g, EdgeHandle h) {
  const Edge& e = g.edge(h);
  if (g.color(e.b) < g.color(e.a)) return {e.b, e.a};
  return {e.a, e.b};
}

inline int distinct_count(VertexId u, VertexId v, VertexId x, VertexId y) {
  int n = 1;
  if (v != u) ++n;
  if (x != u && x != v) ++n;
  if (y != u && y != v && y != x) ++n;
  return n;
}

/// True iff <(u,v),(x,y)> -> <(u,x),(v,y)> leaves every colored degree intact.
/// Each endpoint trades one neighbor color for another; the net change per
/// (vertex, color) must vanish.
inline bool preserves_cdm(const ColoredMultigraph& g, VertexId u, VertexId v, VertexId x, VertexId y) {
  struct Delta { VertexId vertex; ColorId color; int amount; };
  const std::array<Delta, 8> deltas{{
      {u, g.color(v), -1}, {v, g.color(u), -1}, {x, g.color(y), -1}, {y, g.color(x), -1},
      {u, g.color(x), +1}, {x, g.color(u), +1}, {v, g.color(y), +1}, {y, g.color(v), +1},
  }};
  for (const Delta& d : deltas) {
    int net = 0;
    for (const Delta& e : deltas)
      if (e.vertex == d.vertex && e.color == d.color) net += e.amount;
    if (net != 0) return false;
  }
  return true;
}

inline SwapClass classify(const ColoredMultigraph& g, VertexId u, VertexId v, VertexId x, VertexId y) {
  const Edge s1(u, v), s2(x, y), t1(u, x), t2(v, y);
  const bool same = (s1 == t1 && s2 == t2) || (s1 == t2 && s2 == t1);
  if (same) {
    const int k = distinct_count(u, v, x, y);
    if (k == 1 || (k == 2 && (s1.is_loop() != s2.is_loop()))) return SwapClass::Skipped;
    return SwapClass::NonChangingCdes;
  }
  return preserves_cdm(g, u, v, x, y) ? SwapClass::ChangingCdes : SwapClass::OutOfSpace;
}

/// Proposal ratio xi_H(G) / xi_G(H) for a changing swap, read from the live
/// multiplicities. `Scalar` may be an exact rational type.
template <class Scalar = double>
Scalar proposal_ratio(const ColoredMultigraph& g, VertexId u, VertexId v, VertexId x, VertexId y) {
  auto w = [&](VertexId p, VertexId q) { return Scalar(g.multiplicity(p, q)); };
  const Scalar one(1), two(2), four(4);
  switch (distinct_count(u, v, x, y)) {
    case 4:
      return (w(u, x) + one) * (w(v, y) + one) / (w(u, v) * w(x, y));
    case 3:
      if (u == v || x == y) return (w(u, x) + one) * (w(v, y) + one) / (two * w(u, v) * w(x, y));
      return two * (w(u, x) + one) * (w(v, y) + one) / (w(u, v) * w(x, y));
    case 2:
      if (u == v && x == y)
        return (w(u, x) + two) * (w(u, x) + one) / (four * w(u, u) * w(x, x));
      assert(u != v && x != y && g.multiplicity(u, v) >= 2);
      return four * (w(u, u) + one) * (w(v, v) + one) / (w(u, v) * (w(u, v) - one));
    default:
      assert(false && "proposal_ratio called on a non-changing swap");
      return Scalar(0);
  }
}

/// Build and classify the proposal for occurrences `h1`, `h2`; `flip` swaps
/// the orientation of the first occurrence before the targets are formed.
inline SwapProposal make_proposal(const ColoredMultigraph& g, EdgeHandle h1, EdgeHandle h2, bool flip) {
  SwapProposal p;
  p.first = h1;
  p.second = h2;
  std::tie(p.u, p.v) = oriented(g, h1);
  std::tie(p.x, p.y) = oriented(g, h2);
  if (flip) std::swap(p.u, p.v);
  p.kind = classify(g, p.u, p.v, p.x, p.y);
  if (p.kind == SwapClass::ChangingCdes) p.rho = proposal_ratio<double>(g, p.u, p.v, p.x, p.y);
  return p;
}

/// Same as `make_proposal` but without the CDM check: every changing DES is
/// reported as ChangingCdes. Used by the plain configuration-model chain.
inline SwapProposal make_des_proposal(const ColoredMultigraph& g, EdgeHandle h1, EdgeHandle h2, bool flip) {
  SwapProposal p;
  p.first = h1;
  p.second = h2;
  std::tie(p.u, p.v) = oriented(g, h1);
  std::tie(p.x, p.y) = oriented(g, h2);
  if (flip) std::swap(p.u, p.v);
  const Edge s1(p.u, p.v), s2(p.x, p.y), t1(p.u, p.x), t2(p.v, p.y);
  if ((s1 == t1 && s2 == t2) || (s1 == t2 && s2 == t1)) {
    const int k = distinct_count(p.u, p.v, p.x, p.y);
    p.kind = (k == 1 || (k == 2 && s1.is_loop() != s2.is_loop())) ? SwapClass::Skipped
                                                                  : SwapClass::NonChangingCdes;
  } else {
    p.kind = SwapClass::ChangingCdes;
    p.rho = proposal_ratio<double>(g, p.u, p.v, p.x, p.y);
  }
  return p;
}

inline SwapClass classify(const ColoredMultigraph& g, const SwapProposal& p) {
  return classify(g, p.u, p.v, p.x, p.y);
}

inline double compute_rho(const ColoredMultigraph& g, const SwapProposal& p) {
  assert(p.kind == SwapClass::ChangingCdes);
  return proposal_ratio<double>(g, p.u, p.v, p.x, p.y);
}

inline void apply_swap(ColoredMultigraph& g, const SwapProposal& p) {
  g.replace_pair(p.first, p.second, p.u, p.v, p.x, p.y);
}

}  // namespace ccm
