#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccm/graph.hpp"

namespace ccm {

/// Malformed or inconsistent input. `line()` is 1-based, 0 when not tied to a line.
class InputError : public std::runtime_error {
 public:
  InputError(const std::string& source, std::size_t line, const std::string& msg)
      : std::runtime_error(format(source, line, msg)), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line, const std::string& msg) {
    std::ostringstream os;
    os << source;
    if (line > 0) os << ":" << line;
    os << ": " << msg;
    return os.str();
  }
  std::size_t line_;
};

/// A graph together with the external vertex and color names it was read with.
struct LabeledGraph {
  ColoredMultigraph graph;
  std::vector<std::string> vertex_names;
  std::vector<std::string> color_names;

  VertexId vertex(const std::string& name) const {
    auto it = std::find(vertex_names.begin(), vertex_names.end(), name);
    if (it == vertex_names.end()) throw GraphError("unknown vertex '" + name + "'");
    return static_cast<VertexId>(it - vertex_names.begin());
  }
  ColorId color(const std::string& name) const {
    auto it = std::find(color_names.begin(), color_names.end(), name);
    if (it == color_names.end()) throw GraphError("unknown color '" + name + "'");
    return static_cast<ColorId>(it - color_names.begin());
  }
};

namespace detail {

inline bool split_two_fields(const std::string& line, std::string& first, std::string& second) {
  std::istringstream is(line);
  std::string extra;
  if (!(is >> first >> second)) return false;
  return !(is >> extra);
}

inline bool skippable(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace detail

/// Read `vertex<TAB>color` and `u<TAB>v` streams. Vertices and colors are
/// interned to dense ids in order of first appearance in the color source;
/// repeated edge lines add multiplicity, `u == v` is a self-loop.
inline LabeledGraph load_graph(std::istream& node_colors, std::istream& edge_list,
                               const std::string& colors_name = "<colors>",
                               const std::string& edges_name = "<edges>") {
  LabeledGraph out;
  std::unordered_map<std::string, VertexId> vertex_ids;
  std::unordered_map<std::string, ColorId> color_ids;
  std::vector<ColorId> colors;

  std::string line, a, b;
  std::size_t lineno = 0;
  while (std::getline(node_colors, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    if (!detail::split_two_fields(line, a, b))
      throw InputError(colors_name, lineno, "expected 'vertex<TAB>color'");
    auto [cit, fresh_color] = color_ids.try_emplace(b, static_cast<ColorId>(out.color_names.size()));
    if (fresh_color) out.color_names.push_back(b);
    auto [vit, fresh_vertex] = vertex_ids.try_emplace(a, static_cast<VertexId>(out.vertex_names.size()));
    if (!fresh_vertex) {
      if (colors[vit->second] != cit->second)
        throw InputError(colors_name, lineno, "vertex '" + a + "' listed with two colors");
      continue;
    }
    out.vertex_names.push_back(a);
    colors.push_back(cit->second);
  }

  out.graph = ColoredMultigraph(std::move(colors), out.color_names.size());

  lineno = 0;
  while (std::getline(edge_list, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    if (!detail::split_two_fields(line, a, b))
      throw InputError(edges_name, lineno, "expected 'u<TAB>v'");
    auto ua = vertex_ids.find(a);
    if (ua == vertex_ids.end()) throw InputError(edges_name, lineno, "unknown vertex '" + a + "'");
    auto vb = vertex_ids.find(b);
    if (vb == vertex_ids.end()) throw InputError(edges_name, lineno, "unknown vertex '" + b + "'");
    out.graph.add_edge(ua->second, vb->second);
  }
  if (out.graph.num_edges() == 0) throw InputError(edges_name, 0, "edge list is empty");
  return out;
}

inline LabeledGraph load_graph_files(const std::string& colors_path, const std::string& edges_path) {
  std::ifstream colors(colors_path);
  if (!colors) throw InputError(colors_path, 0, "cannot open file");
  std::ifstream edges(edges_path);
  if (!edges) throw InputError(edges_path, 0, "cannot open file");
  return load_graph(colors, edges, colors_path, edges_path);
}

/// Canonical edge list: one line per occurrence, sorted by dense endpoint ids.
inline void write_edges(std::ostream& os, const ColoredMultigraph& g,
                        const std::vector<std::string>& names) {
  std::vector<Edge> sorted = g.edges();
  std::sort(sorted.begin(), sorted.end());
  for (const Edge& e : sorted) os << names[e.a] << '\t' << names[e.b] << '\n';
}

inline void write_colors(std::ostream& os, const LabeledGraph& lg) {
  for (VertexId v = 0; v < lg.graph.num_vertices(); ++v)
    os << lg.vertex_names[v] << '\t' << lg.color_names[lg.graph.color(v)] << '\n';
}

}  // namespace ccm
