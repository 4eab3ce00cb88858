#pragma once

#include <set>
#include <string>
#include <vector>

#include "dmc/forest.hpp"
#include "dmc/graph.hpp"

namespace dmc {

// Diagnostic outcome: one entry per violated invariant.
struct ValidationReport {
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }

  std::string to_string() const {
    std::string out;
    for (const auto& p : problems) {
      if (!out.empty()) out += "; ";
      out += p;
    }
    return out;
  }
};

// Check that (g, f) is a consistent observation: the forest's leaves are
// exactly the graph's vertices, the forest is binary and acyclic, and the
// tree/internal-node counts match a growth from a two-node seed.
inline ValidationReport validate_pair(const PpiGraph& g, const DuplicationForest& f) {
  ValidationReport rep;

  std::set<VertexId> leaf_set;
  std::size_t internal_count = 0;
  std::size_t root_count = 0;
  for (const auto& [id, n] : f.nodes()) {
    if (n.children.empty()) {
      leaf_set.insert(id);
    } else if (n.children.size() == 2) {
      ++internal_count;
    } else {
      rep.problems.push_back("node " + id + " has " +
                             std::to_string(n.children.size()) + " children (need 0 or 2)");
    }
    if (!n.parent) ++root_count;

    // parent/children mutual consistency
    if (n.parent) {
      if (!f.has_node(*n.parent)) {
        rep.problems.push_back("node " + id + " has unknown parent " + *n.parent);
      } else {
        const auto& sibs = f.children(*n.parent);
        bool found = false;
        for (const auto& c : sibs) found = found || c == id;
        if (!found) {
          rep.problems.push_back("node " + id + " missing from children of " + *n.parent);
        }
      }
    }
    for (const auto& c : n.children) {
      if (!f.has_node(c)) {
        rep.problems.push_back("node " + id + " has unknown child " + c);
      } else if (!f.parent(c) || *f.parent(c) != id) {
        rep.problems.push_back("child " + c + " does not point back to " + id);
      }
    }
  }

  // acyclicity: walking up from any node must reach a root within node_count steps
  for (const auto& [id, n] : f.nodes()) {
    NodeId cur = id;
    std::size_t hops = 0;
    while (f.has_node(cur) && f.parent(cur)) {
      cur = *f.parent(cur);
      if (++hops > f.node_count()) {
        rep.problems.push_back("parent chain from " + id + " does not terminate");
        break;
      }
    }
  }

  std::set<VertexId> vertex_set;
  for (const auto& v : g.vertices()) vertex_set.insert(v);
  if (leaf_set != vertex_set) {
    rep.problems.push_back("forest leaves do not match graph vertices");
  }

  // seed graph has two nodes, so a valid history has exactly 2 trees and
  // |V| - 2 duplication events
  if (root_count != 2) {
    rep.problems.push_back("forest has " + std::to_string(root_count) + " trees (need 2)");
  }
  if (g.vertex_count() >= 2 && internal_count != g.vertex_count() - 2) {
    rep.problems.push_back("forest has " + std::to_string(internal_count) +
                           " internal nodes (need " + std::to_string(g.vertex_count() - 2) + ")");
  }
  if (g.vertex_count() < 2) {
    rep.problems.push_back("graph has fewer than 2 vertices");
  }

  return rep;
}

inline void require_valid_pair(const PpiGraph& g, const DuplicationForest& f) {
  ValidationReport rep = validate_pair(g, f);
  if (!rep.ok()) {
    throw Error(ErrorCode::invalid_pair, "invalid (graph, forest) pair: " + rep.to_string());
  }
}

}  // namespace dmc
