#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmc/errors.hpp"
#include "dmc/graph.hpp"

namespace dmc {

// Node labels share the VertexId token space; leaves carry graph vertex ids,
// internal nodes live in a disjoint "i<k>" namespace.
using NodeId = std::string;

// Rooted binary forest recording duplication events. Every node has zero or
// two children; leaves biject onto the vertices of the paired graph.
class DuplicationForest {
 public:
  struct Node {
    std::optional<NodeId> parent;
    std::vector<NodeId> children;  // empty (leaf) or exactly two
  };

  DuplicationForest() = default;

  static DuplicationForest singletons(const std::vector<NodeId>& ids) {
    DuplicationForest f;
    for (const auto& id : ids) f.add_root(id);
    return f;
  }

  void add_root(const NodeId& id) {
    if (nodes_.contains(id)) {
      throw Error(ErrorCode::duplicate_node, "duplicate node: " + id);
    }
    nodes_.emplace(id, Node{});
  }

  bool has_node(const NodeId& id) const { return nodes_.contains(id); }

  bool is_leaf(const NodeId& id) const { return node(id).children.empty(); }

  const std::optional<NodeId>& parent(const NodeId& id) const { return node(id).parent; }

  const std::vector<NodeId>& children(const NodeId& id) const { return node(id).children; }

  std::size_t node_count() const { return nodes_.size(); }

  std::vector<NodeId> leaves() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes_) {
      if (n.children.empty()) out.push_back(id);
    }
    return out;
  }

  std::vector<NodeId> roots() const {
    std::vector<NodeId> out;
    for (const auto& [id, n] : nodes_) {
      if (!n.parent) out.push_back(id);
    }
    return out;
  }

  std::vector<NodeId> node_ids() const {
    std::vector<NodeId> out;
    out.reserve(nodes_.size());
    for (const auto& [id, n] : nodes_) out.push_back(id);
    return out;
  }

  const std::map<NodeId, Node>& nodes() const { return nodes_; }

  // Structural equality; child order is not semantic.
  bool operator==(const DuplicationForest& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (const auto& [id, n] : nodes_) {
      auto it = other.nodes_.find(id);
      if (it == other.nodes_.end()) return false;
      if (n.parent != it->second.parent) return false;
      auto a = n.children;
      auto b = it->second.children;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) return false;
    }
    return true;
  }

  // Fresh internal id "i<k>"; k counts up from the number of internal nodes
  // and skips anything already taken.
  NodeId fresh_internal_id() const {
    std::size_t k = 0;
    for (const auto& [id, n] : nodes_) {
      if (!n.children.empty()) ++k;
    }
    while (nodes_.contains("i" + std::to_string(k))) ++k;
    return "i" + std::to_string(k);
  }

  // Low-level edits used by the structural operations below and by parsing.
  void attach(const NodeId& child, const NodeId& parent) {
    node_mut(child).parent = parent;
    node_mut(parent).children.push_back(child);
  }

  void erase_node(const NodeId& id) { nodes_.erase(id); }

  // Rename a node in place, preserving its links. The new id must be free.
  void rename_node(const NodeId& from, const NodeId& to) {
    Node n = node(from);
    if (nodes_.contains(to)) {
      throw Error(ErrorCode::duplicate_node, "rename target exists: " + to);
    }
    if (n.parent) {
      for (auto& c : node_mut(*n.parent).children) {
        if (c == from) c = to;
      }
    }
    for (const auto& c : n.children) node_mut(c).parent = to;
    nodes_.erase(from);
    nodes_.emplace(to, std::move(n));
  }

  Node& node_mut(const NodeId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
      throw Error(ErrorCode::unknown_node, "unknown node: " + id);
    }
    return it->second;
  }

 private:
  const Node& node(const NodeId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
      throw Error(ErrorCode::unknown_node, "unknown node: " + id);
    }
    return it->second;
  }

  std::map<NodeId, Node> nodes_;
};

// Two sibling leaves and their parent: the only sites where a backward merge
// is possible.
struct Cherry {
  VertexId left;    // smaller child id
  VertexId right;   // larger child id
  NodeId parent;

  bool operator==(const Cherry&) const = default;
};

// All cherries, sorted by parent id. Empty iff every tree is a singleton.
inline std::vector<Cherry> cherries(const DuplicationForest& f) {
  std::vector<Cherry> out;
  for (const auto& [id, n] : f.nodes()) {
    if (n.children.size() == 2 && f.is_leaf(n.children[0]) && f.is_leaf(n.children[1])) {
      Cherry c{n.children[0], n.children[1], id};
      if (c.right < c.left) std::swap(c.left, c.right);
      out.push_back(std::move(c));
    }
  }
  return out;  // map order = sorted by parent id
}

// Backward merge on the forest side. The duplicate leaf v and its sibling u
// disappear; their parent becomes a leaf relabeled u, so the anchor keeps its
// identity through the merge. Returns the new forest and the anchor id.
inline std::pair<DuplicationForest, VertexId> contract_cherry(const DuplicationForest& f,
                                                              const VertexId& v) {
  if (!f.has_node(v) || !f.is_leaf(v) || !f.parent(v)) {
    throw Error(ErrorCode::not_a_cherry_leaf, "not a cherry leaf: " + v);
  }
  const NodeId p = *f.parent(v);
  const auto& kids = f.children(p);
  if (kids.size() != 2) {
    throw Error(ErrorCode::invalid_pair, "node " + p + " is not binary");
  }
  const NodeId u = (kids[0] == v) ? kids[1] : kids[0];
  if (!f.is_leaf(u)) {
    throw Error(ErrorCode::not_a_cherry_leaf, "sibling of " + v + " is not a leaf");
  }
  DuplicationForest out = f;
  out.erase_node(v);
  out.erase_node(u);
  out.node_mut(p).children.clear();
  out.rename_node(p, u);
  return {std::move(out), u};
}

// Forward growth on the forest side: the anchor leaf u is replaced by a fresh
// internal node whose children are the leaves u and v. Inverse of
// contract_cherry(., v).
inline DuplicationForest expand_leaf(const DuplicationForest& f, const VertexId& u,
                                     const VertexId& v) {
  if (!f.has_node(u) || !f.is_leaf(u)) {
    throw Error(ErrorCode::unknown_node, "expand_leaf: no such leaf: " + u);
  }
  if (f.has_node(v)) {
    throw Error(ErrorCode::duplicate_node, "expand_leaf: id already in forest: " + v);
  }
  DuplicationForest out = f;
  const NodeId internal = out.fresh_internal_id();
  out.rename_node(u, internal);
  out.add_root(u);
  out.add_root(v);
  out.node_mut(u).parent = internal;
  out.node_mut(v).parent = internal;
  out.node_mut(internal).children = {u, v};
  return out;
}

}  // namespace dmc
