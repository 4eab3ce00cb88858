#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "dmc/forest.hpp"
#include "dmc/graph.hpp"
#include "dmc/model.hpp"

namespace dmc {

// Index-based mirror of the (graph, forest) pair for the SMC inner loop.
// Labels are interned once per run; the per-particle state is then a few
// flat arrays whose copy is a memcpy, and a backward merge is O(degree).
// The labeled operations in graph.hpp/forest.hpp stay the reference
// semantics; equivalence of the two routes is covered by tests.

// Shared, immutable per-run tables.
struct CompactTables {
  std::vector<VertexId> vertex_ids;  // vertex index -> label, sorted
  std::vector<NodeId> node_ids;      // forest node index -> label, sorted
  std::uint32_t n_vertices = 0;
  std::uint32_t n_nodes = 0;
  std::uint32_t words = 0;  // adjacency row width in 64-bit words
};

class CompactState {
 public:
  CompactState() = default;

  // Build tables + initial state from a validated pair.
  static std::pair<CompactTables, CompactState> build(const PpiGraph& g,
                                                      const DuplicationForest& f) {
    CompactTables tb;
    tb.vertex_ids = g.vertices();
    tb.node_ids = f.node_ids();
    tb.n_vertices = static_cast<std::uint32_t>(tb.vertex_ids.size());
    tb.n_nodes = static_cast<std::uint32_t>(tb.node_ids.size());
    tb.words = (tb.n_vertices + 63) / 64;

    std::map<VertexId, std::uint32_t> vindex;
    for (std::uint32_t i = 0; i < tb.n_vertices; ++i) vindex[tb.vertex_ids[i]] = i;
    std::map<NodeId, std::uint32_t> nindex;
    for (std::uint32_t i = 0; i < tb.n_nodes; ++i) nindex[tb.node_ids[i]] = i;

    CompactState st;
    st.adj_.assign(static_cast<std::size_t>(tb.n_vertices) * tb.words, 0);
    st.vertex_alive_.assign(tb.words, 0);
    st.n_alive_ = tb.n_vertices;
    for (std::uint32_t i = 0; i < tb.n_vertices; ++i) {
      st.vertex_alive_[i / 64] |= std::uint64_t{1} << (i % 64);
    }
    for (const auto& [a, b] : g.edges()) {
      const std::uint32_t ia = vindex[a], ib = vindex[b];
      st.row(tb, ia)[ib / 64] |= std::uint64_t{1} << (ib % 64);
      st.row(tb, ib)[ia / 64] |= std::uint64_t{1} << (ia % 64);
    }

    st.parent_.assign(tb.n_nodes, -1);
    st.children_.assign(tb.n_nodes, {-1, -1});
    st.leaf_vertex_.assign(tb.n_nodes, -1);
    st.vertex_node_.assign(tb.n_vertices, -1);
    st.node_alive_.assign(tb.n_nodes, 1);
    for (std::uint32_t i = 0; i < tb.n_nodes; ++i) {
      const auto& node = f.nodes().at(tb.node_ids[i]);
      if (node.parent) st.parent_[i] = static_cast<std::int32_t>(nindex[*node.parent]);
      if (node.children.empty()) {
        const std::uint32_t vi = vindex.at(tb.node_ids[i]);  // leaves carry vertex ids
        st.leaf_vertex_[i] = static_cast<std::int32_t>(vi);
        st.vertex_node_[vi] = static_cast<std::int32_t>(i);
      } else {
        st.children_[i] = {static_cast<std::int32_t>(nindex[node.children[0]]),
                           static_cast<std::int32_t>(nindex[node.children[1]])};
      }
    }
    return {std::move(tb), std::move(st)};
  }

  std::uint32_t n_alive() const { return n_alive_; }

  bool is_leaf_node(std::uint32_t node) const { return children_[node][0] < 0; }

  // Collect cherries in node-index order into `out` (cleared first).
  void collect_cherries(const CompactTables& tb, std::vector<std::uint32_t>& out) const {
    out.clear();
    for (std::uint32_t i = 0; i < tb.n_nodes; ++i) {
      if (!node_alive_[i] || is_leaf_node(i)) continue;
      const auto& c = children_[i];
      if (node_alive_[c[0]] && node_alive_[c[1]] && is_leaf_node(c[0]) && is_leaf_node(c[1])) {
        out.push_back(i);
      }
    }
  }

  std::uint32_t leaf_vertex(std::uint32_t node) const {
    return static_cast<std::uint32_t>(leaf_vertex_[node]);
  }

  std::array<std::int32_t, 2> children_of(std::uint32_t node) const { return children_[node]; }

  bool has_edge(const CompactTables& tb, std::uint32_t a, std::uint32_t b) const {
    return (row(tb, a)[b / 64] >> (b % 64)) & 1;
  }

  // Transition counts for the merge of duplicate v into anchor u, evaluated
  // on the *current* (post-duplication) graph. Mirrors transition_log_prob.
  double merge_log_prob(const CompactTables& tb, std::uint32_t u, std::uint32_t v,
                        const DmcParams& m) const {
    const std::uint64_t* ru = row(tb, u);
    const std::uint64_t* rv = row(tb, v);
    std::size_t k_both = 0, k_one = 0;
    for (std::uint32_t w = 0; w < tb.words; ++w) {
      std::uint64_t a = ru[w], b = rv[w];
      if (w == u / 64) {
        a &= ~(std::uint64_t{1} << (u % 64));
        b &= ~(std::uint64_t{1} << (u % 64));
      }
      if (w == v / 64) {
        a &= ~(std::uint64_t{1} << (v % 64));
        b &= ~(std::uint64_t{1} << (v % 64));
      }
      k_both += static_cast<std::size_t>(std::popcount(a & b));
      k_one += static_cast<std::size_t>(std::popcount(a ^ b));
    }
    return transition_log_prob_from_counts(n_alive_ - 1, k_both, k_one, has_edge(tb, u, v), m);
  }

  // Merge duplicate vertex v into anchor u and contract the forest cherry.
  // The anchor keeps its identity: the cherry's parent node becomes the leaf
  // for u.
  void contract(const CompactTables& tb, std::uint32_t u, std::uint32_t v) {
    std::uint64_t* ru = row(tb, u);
    const std::uint64_t* rv = row(tb, v);

    // reattach v's neighbors to u
    for (std::uint32_t w = 0; w < tb.words; ++w) ru[w] |= rv[w];
    clear_bit(ru, u);
    clear_bit(ru, v);
    for (std::uint32_t word = 0; word < tb.words; ++word) {
      std::uint64_t bits = rv[word];
      while (bits) {
        const std::uint32_t nb = static_cast<std::uint32_t>(std::countr_zero(bits));
        bits &= bits - 1;
        const std::uint32_t wv = word * 64 + nb;
        if (wv == u) continue;
        std::uint64_t* rw = row(tb, wv);
        clear_bit(rw, v);
        set_bit(rw, u);
      }
    }
    std::uint64_t* rvm = row(tb, v);
    for (std::uint32_t w = 0; w < tb.words; ++w) rvm[w] = 0;
    clear_bit(vertex_alive_.data(), v);
    --n_alive_;

    // forest side
    const std::int32_t nv = vertex_node_[v];
    const std::int32_t p = parent_[nv];
    const std::int32_t nu = vertex_node_[u];
    node_alive_[nv] = 0;
    node_alive_[nu] = 0;
    children_[p] = {-1, -1};
    leaf_vertex_[p] = static_cast<std::int32_t>(u);
    vertex_node_[u] = p;
    vertex_node_[v] = -1;
  }

  // The two remaining vertices once everything has been merged away.
  std::pair<std::uint32_t, std::uint32_t> final_vertices(const CompactTables& tb) const {
    std::uint32_t a = tb.n_vertices, b = tb.n_vertices;
    for (std::uint32_t word = 0; word < tb.words; ++word) {
      std::uint64_t bits = vertex_alive_[word];
      while (bits) {
        const std::uint32_t v = word * 64 + static_cast<std::uint32_t>(std::countr_zero(bits));
        bits &= bits - 1;
        (a == tb.n_vertices ? a : b) = v;
      }
    }
    return {a, b};
  }

  // Reconstruct the labeled pair for result reporting.
  PpiGraph to_graph(const CompactTables& tb) const {
    PpiGraph g;
    for (std::uint32_t v = 0; v < tb.n_vertices; ++v) {
      if (alive_vertex(v)) g.add_vertex(tb.vertex_ids[v]);
    }
    for (std::uint32_t v = 0; v < tb.n_vertices; ++v) {
      if (!alive_vertex(v)) continue;
      const std::uint64_t* rv = row(tb, v);
      for (std::uint32_t word = 0; word < tb.words; ++word) {
        std::uint64_t bits = rv[word];
        while (bits) {
          const std::uint32_t w = word * 64 + static_cast<std::uint32_t>(std::countr_zero(bits));
          bits &= bits - 1;
          if (v < w) g.add_edge(tb.vertex_ids[v], tb.vertex_ids[w]);
        }
      }
    }
    return g;
  }

  DuplicationForest to_forest(const CompactTables& tb) const {
    DuplicationForest f;
    auto label = [&](std::uint32_t node) -> NodeId {
      return is_leaf_node(node) ? tb.vertex_ids[leaf_vertex(node)] : tb.node_ids[node];
    };
    for (std::uint32_t i = 0; i < tb.n_nodes; ++i) {
      if (node_alive_[i]) f.add_root(label(i));
    }
    for (std::uint32_t i = 0; i < tb.n_nodes; ++i) {
      if (!node_alive_[i]) continue;
      const std::int32_t p = parent_[i];
      if (p >= 0 && node_alive_[p]) {
        f.attach(label(i), label(static_cast<std::uint32_t>(p)));
      }
    }
    return f;
  }

  bool alive_vertex(std::uint32_t v) const {
    return (vertex_alive_[v / 64] >> (v % 64)) & 1;
  }

 private:
  std::uint64_t* row(const CompactTables& tb, std::uint32_t v) {
    return adj_.data() + static_cast<std::size_t>(v) * tb.words;
  }
  const std::uint64_t* row(const CompactTables& tb, std::uint32_t v) const {
    return adj_.data() + static_cast<std::size_t>(v) * tb.words;
  }

  static void set_bit(std::uint64_t* row, std::uint32_t i) {
    row[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  static void clear_bit(std::uint64_t* row, std::uint32_t i) {
    row[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  // graph
  std::vector<std::uint64_t> adj_;
  std::vector<std::uint64_t> vertex_alive_;
  std::uint32_t n_alive_ = 0;

  // forest: children {-1,-1} marks a leaf; leaf_vertex_ maps live leaves to
  // their vertex index and vertex_node_ is the inverse
  std::vector<std::int32_t> parent_;
  std::vector<std::array<std::int32_t, 2>> children_;
  std::vector<std::int32_t> leaf_vertex_;
  std::vector<std::int32_t> vertex_node_;
  std::vector<std::uint8_t> node_alive_;
};

}  // namespace dmc
