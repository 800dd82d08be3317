#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ccm {

using VertexId = std::uint32_t;
using ColorId = std::uint32_t;
using EdgeHandle = std::uint32_t;

/// An undirected edge stored with `a <= b`.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;

  Edge() = default;
  Edge(VertexId p, VertexId q) : a(p < q ? p : q), b(p < q ? q : p) {}

  bool is_loop() const { return a == b; }
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::uint64_t pair_key(VertexId p, VertexId q) {
  if (p > q) std::swap(p, q);
  return (std::uint64_t{p} << 32) | q;
}

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Colored Degree Matrix: `at(color, v)` is the number of neighbors of `v`
/// with that color, counted with multiplicity (a self-loop counts twice).
class ColoredDegreeMatrix {
 public:
  ColoredDegreeMatrix() = default;
  ColoredDegreeMatrix(std::size_t colors, std::size_t vertices)
      : colors_(colors), vertices_(vertices), entries_(colors * vertices, 0) {}

  std::size_t colors() const { return colors_; }
  std::size_t vertices() const { return vertices_; }
  std::uint32_t at(ColorId l, VertexId v) const { return entries_[v * colors_ + l]; }
  std::uint32_t& at(ColorId l, VertexId v) { return entries_[v * colors_ + l]; }
  const std::vector<std::uint32_t>& raw() const { return entries_; }

  friend bool operator==(const ColoredDegreeMatrix&, const ColoredDegreeMatrix&) = default;

 private:
  std::size_t colors_ = 0;
  std::size_t vertices_ = 0;
  std::vector<std::uint32_t> entries_;  // vertex-major
};

/// Symmetric |L|x|L| matrix of edge counts between color pairs.
class JointColorMatrix {
 public:
  JointColorMatrix() = default;
  explicit JointColorMatrix(std::size_t colors) : colors_(colors), entries_(colors * colors, 0) {}

  std::size_t colors() const { return colors_; }
  std::uint64_t at(ColorId l, ColorId r) const { return entries_[l * colors_ + r]; }
  std::uint64_t& at(ColorId l, ColorId r) { return entries_[l * colors_ + r]; }

  friend bool operator==(const JointColorMatrix&, const JointColorMatrix&) = default;

 private:
  std::size_t colors_ = 0;
  std::vector<std::uint64_t> entries_;
};

/// Vertex-colored undirected multigraph with self-loops.
///
/// Edge occurrences live in a flat array indexed by `EdgeHandle`. Handles are
/// stable: a swap rewrites the two occurrences in place. Each occurrence is
/// also listed in exactly one color-class list (the class of its unordered
/// endpoint color pair) and carries a back-pointer to its slot there, so
/// class membership changes are O(1) swap-removes.
class ColoredMultigraph {
 public:
  ColoredMultigraph() = default;

  /// `colors[v]` is the color of vertex v; color ids must be < num_colors.
  ColoredMultigraph(std::vector<ColorId> colors, std::size_t num_colors)
      : color_of_(std::move(colors)), num_colors_(num_colors) {
    for (ColorId c : color_of_) {
      if (c >= num_colors_) throw GraphError("color id out of range");
    }
    class_lists_.resize(num_colors_ * num_colors_);
    colored_degree_ = ColoredDegreeMatrix(num_colors_, color_of_.size());
    degree_.assign(color_of_.size(), 0);
  }

  std::size_t num_vertices() const { return color_of_.size(); }
  std::size_t num_colors() const { return num_colors_; }
  std::size_t num_edges() const { return edges_.size(); }

  ColorId color(VertexId v) const { return color_of_[v]; }
  const std::vector<ColorId>& colors() const { return color_of_; }

  std::uint32_t degree(VertexId v) const { return degree_[v]; }
  std::uint32_t colored_degree(ColorId l, VertexId v) const { return colored_degree_.at(l, v); }
  const ColoredDegreeMatrix& cdm() const { return colored_degree_; }

  const Edge& edge(EdgeHandle h) const { return edges_[h]; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::uint32_t multiplicity(VertexId p, VertexId q) const {
    auto it = multiplicity_.find(pair_key(p, q));
    return it == multiplicity_.end() ? 0 : it->second;
  }

  /// Dense id of the unordered color class {l, r}.
  std::size_t class_id(ColorId l, ColorId r) const {
    return l <= r ? std::size_t{l} * num_colors_ + r : std::size_t{r} * num_colors_ + l;
  }
  std::size_t class_of(const Edge& e) const { return class_id(color_of_[e.a], color_of_[e.b]); }
  std::size_t num_class_slots() const { return class_lists_.size(); }
  const std::vector<EdgeHandle>& class_list(std::size_t cls) const { return class_lists_[cls]; }
  const std::vector<EdgeHandle>& class_list(ColorId l, ColorId r) const {
    return class_lists_[class_id(l, r)];
  }
  std::size_t class_size(ColorId l, ColorId r) const { return class_lists_[class_id(l, r)].size(); }
  std::uint32_t class_position(EdgeHandle h) const { return class_pos_[h]; }

  EdgeHandle add_edge(VertexId p, VertexId q) {
    if (p >= num_vertices() || q >= num_vertices()) throw GraphError("vertex id out of range");
    if (edges_.size() >= std::numeric_limits<EdgeHandle>::max()) throw GraphError("too many edges");
    const auto h = static_cast<EdgeHandle>(edges_.size());
    edges_.emplace_back(p, q);
    class_pos_.push_back(0);
    link(h);
    return h;
  }

  /// Rewrite occurrences `h1 = {u,v}` and `h2 = {x,y}` into `{u,x}` and `{v,y}`.
  /// Throws if either handle no longer holds the stated pair.
  void replace_pair(EdgeHandle h1, EdgeHandle h2, VertexId u, VertexId v, VertexId x, VertexId y) {
    if (h1 == h2 || h1 >= edges_.size() || h2 >= edges_.size())
      throw GraphError("invalid edge occurrence handle");
    if (edges_[h1] != Edge(u, v) || edges_[h2] != Edge(x, y))
      throw GraphError("stale edge occurrence handle");
    unlink(h1);
    unlink(h2);
    edges_[h1] = Edge(u, x);
    edges_[h2] = Edge(v, y);
    link(h1);
    link(h2);
  }

  friend bool operator==(const ColoredMultigraph& lhs, const ColoredMultigraph& rhs) {
    return lhs.color_of_ == rhs.color_of_ && lhs.num_colors_ == rhs.num_colors_ &&
           lhs.multiplicity_ == rhs.multiplicity_;
  }

  /// Recompute every index from the occurrence array and compare with the
  /// incrementally maintained ones.
  bool indices_consistent() const {
    ColoredMultigraph fresh(color_of_, num_colors_);
    for (const Edge& e : edges_) fresh.add_edge(e.a, e.b);
    if (fresh.multiplicity_ != multiplicity_ || fresh.colored_degree_ != colored_degree_ ||
        fresh.degree_ != degree_)
      return false;
    std::size_t listed = 0;
    for (std::size_t c = 0; c < class_lists_.size(); ++c) {
      if (class_lists_[c].size() != fresh.class_lists_[c].size()) return false;
      for (std::size_t i = 0; i < class_lists_[c].size(); ++i) {
        const EdgeHandle h = class_lists_[c][i];
        if (class_of(edges_[h]) != c || class_pos_[h] != i) return false;
      }
      listed += class_lists_[c].size();
    }
    return listed == edges_.size();
  }

 private:
  void link(EdgeHandle h) {
    const Edge& e = edges_[h];
    auto& list = class_lists_[class_of(e)];
    class_pos_[h] = static_cast<std::uint32_t>(list.size());
    list.push_back(h);
    ++multiplicity_[pair_key(e.a, e.b)];
    ++degree_[e.a];
    ++degree_[e.b];
    ++colored_degree_.at(color_of_[e.b], e.a);
    ++colored_degree_.at(color_of_[e.a], e.b);
  }

  void unlink(EdgeHandle h) {
    const Edge& e = edges_[h];
    auto& list = class_lists_[class_of(e)];
    const std::uint32_t pos = class_pos_[h];
    const EdgeHandle last = list.back();
    list[pos] = last;
    class_pos_[last] = pos;
    list.pop_back();
    auto it = multiplicity_.find(pair_key(e.a, e.b));
    if (--it->second == 0) multiplicity_.erase(it);
    --degree_[e.a];
    --degree_[e.b];
    --colored_degree_.at(color_of_[e.b], e.a);
    --colored_degree_.at(color_of_[e.a], e.b);
  }

  std::vector<ColorId> color_of_;
  std::size_t num_colors_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> class_pos_;
  std::vector<std::vector<EdgeHandle>> class_lists_;
  std::unordered_map<std::uint64_t, std::uint32_t> multiplicity_;
  ColoredDegreeMatrix colored_degree_;
  std::vector<std::uint32_t> degree_;
};

inline ColoredDegreeMatrix cdm(const ColoredMultigraph& g) { return g.cdm(); }

/// Joint Color Matrix obtained by summing CDM entries: the diagonal halves the
/// same-color degree mass, off-diagonal entries count l-colored neighbors of
/// r-colored vertices.
inline JointColorMatrix jcm(const ColoredMultigraph& g) {
  const std::size_t colors = g.num_colors();
  JointColorMatrix j(colors);
  std::vector<std::uint64_t> twice_diag(colors, 0);
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    const ColorId cv = g.color(v);
    for (ColorId l = 0; l < colors; ++l) {
      if (l == cv)
        twice_diag[l] += g.colored_degree(l, v);
      else
        j.at(l, cv) += g.colored_degree(l, v);
    }
  }
  for (ColorId l = 0; l < colors; ++l) j.at(l, l) = twice_diag[l] / 2;
  return j;
}

template <class Rng>
EdgeHandle sample_edge_uniform(const ColoredMultigraph& g, Rng& rng) {
  if (g.num_edges() == 0) throw GraphError("cannot sample from an empty edge set");
  std::uniform_int_distribution<std::size_t> pick(0, g.num_edges() - 1);
  return static_cast<EdgeHandle>(pick(rng));
}

/// Uniform occurrence of class `cls` other than `excluded` (which must belong
/// to that class). Draws a slot from all but one position and redirects a hit
/// on the excluded slot to the tail slot, so only that single occurrence is
/// removed from the support, not its parallel copies.
template <class Rng>
EdgeHandle sample_class_edge_excluding(const ColoredMultigraph& g, std::size_t cls,
                                       EdgeHandle excluded, Rng& rng) {
  const auto& list = g.class_list(cls);
  if (list.size() < 2) throw GraphError("class needs at least two occurrences for exclusion sampling");
  const std::uint32_t skip = g.class_position(excluded);
  if (skip >= list.size() || list[skip] != excluded)
    throw GraphError("excluded occurrence is not in the requested class");
  std::uniform_int_distribution<std::size_t> pick(0, list.size() - 2);
  std::size_t slot = pick(rng);
  if (slot == skip) slot = list.size() - 1;
  return list[slot];
}

/// Sufficient condition for an aperiodic CDES chain: either two
/// monochromatic occurrences of one color, or a vertex with at least two
/// neighbors of a single foreign color.
inline bool has_aperiodicity_witness(const ColoredMultigraph& g) {
  for (ColorId l = 0; l < g.num_colors(); ++l)
    if (g.class_size(l, l) >= 2) return true;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    for (ColorId l = 0; l < g.num_colors(); ++l)
      if (l != g.color(v) && g.colored_degree(l, v) >= 2) return true;
  return false;
}

}  // namespace ccm
