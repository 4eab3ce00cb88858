#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmc/errors.hpp"

namespace dmc {

// Opaque vertex label. Kept as a free-form token so observed datasets with
// arbitrary protein names load unchanged.
using VertexId = std::string;

// Undirected simple graph over labeled vertices. Symmetric adjacency, no
// self-loops, no multi-edges; isolated vertices are first-class. Immutable
// by convention once built: all structural edits return a new value.
class PpiGraph {
 public:
  PpiGraph() = default;

  void add_vertex(const VertexId& v) {
    if (adjacency_.contains(v)) {
      throw Error(ErrorCode::duplicate_vertex, "duplicate vertex: " + v);
    }
    adjacency_.emplace(v, std::set<VertexId>{});
  }

  void add_edge(const VertexId& a, const VertexId& b) {
    if (a == b) throw Error(ErrorCode::self_loop, "self-loop at " + a);
    auto ia = adjacency_.find(a);
    auto ib = adjacency_.find(b);
    if (ia == adjacency_.end() || ib == adjacency_.end()) {
      throw Error(ErrorCode::unknown_vertex,
                  "edge references undeclared vertex: " + (ia == adjacency_.end() ? a : b));
    }
    if (ia->second.contains(b)) {
      throw Error(ErrorCode::duplicate_edge, "duplicate edge " + a + " " + b);
    }
    ia->second.insert(b);
    ib->second.insert(a);
  }

  void remove_edge(const VertexId& a, const VertexId& b) {
    auto ia = adjacency_.find(a);
    auto ib = adjacency_.find(b);
    if (ia == adjacency_.end() || ib == adjacency_.end() || !ia->second.contains(b)) {
      throw Error(ErrorCode::unknown_vertex, "no such edge " + a + " " + b);
    }
    ia->second.erase(b);
    ib->second.erase(a);
  }

  bool has_vertex(const VertexId& v) const { return adjacency_.contains(v); }

  bool has_edge(const VertexId& a, const VertexId& b) const {
    auto it = adjacency_.find(a);
    return it != adjacency_.end() && it->second.contains(b);
  }

  const std::set<VertexId>& neighbors(const VertexId& v) const {
    auto it = adjacency_.find(v);
    if (it == adjacency_.end()) {
      throw Error(ErrorCode::unknown_vertex, "unknown vertex: " + v);
    }
    return it->second;
  }

  std::size_t degree(const VertexId& v) const { return neighbors(v).size(); }

  std::size_t vertex_count() const { return adjacency_.size(); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& [v, nbrs] : adjacency_) twice += nbrs.size();
    return twice / 2;
  }

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(adjacency_.size());
    for (const auto& [v, nbrs] : adjacency_) out.push_back(v);
    return out;  // sorted: map iteration order
  }

  // Sorted unordered pairs (a < b).
  std::vector<std::pair<VertexId, VertexId>> edges() const {
    std::vector<std::pair<VertexId, VertexId>> out;
    for (const auto& [v, nbrs] : adjacency_) {
      for (const auto& w : nbrs) {
        if (v < w) out.emplace_back(v, w);
      }
    }
    return out;
  }

  const std::map<VertexId, std::set<VertexId>>& adjacency() const { return adjacency_; }

  bool operator==(const PpiGraph& other) const = default;

 private:
  std::map<VertexId, std::set<VertexId>> adjacency_;
};

inline PpiGraph make_graph(const std::vector<VertexId>& vertices,
                           const std::vector<std::pair<VertexId, VertexId>>& edges) {
  PpiGraph g;
  for (const auto& v : vertices) g.add_vertex(v);
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

// Neighborhood N_G(v), excluding v itself.
inline const std::set<VertexId>& neighbors(const PpiGraph& g, const VertexId& v) {
  return g.neighbors(v);
}

// Backward merge on the graph side: remove the duplicate v and reattach its
// neighbors to the anchor u. Any u-v edge vanishes with v.
inline PpiGraph contract_duplicate(const PpiGraph& g, const VertexId& u,
                                   const VertexId& v) {
  if (u == v) {
    throw Error(ErrorCode::bad_parameter, "contract_duplicate: u == v (" + u + ")");
  }
  if (!g.has_vertex(u) || !g.has_vertex(v)) {
    throw Error(ErrorCode::unknown_vertex,
                "contract_duplicate: unknown vertex " + (g.has_vertex(u) ? v : u));
  }
  PpiGraph out;
  for (const auto& [w, nbrs] : g.adjacency()) {
    if (w != v) out.add_vertex(w);
  }
  for (const auto& [a, b] : g.edges()) {
    if (a == v || b == v) continue;
    out.add_edge(a, b);
  }
  for (const auto& w : g.neighbors(v)) {
    if (w == u) continue;
    if (!out.has_edge(u, w)) out.add_edge(u, w);
  }
  return out;
}

}  // namespace dmc
