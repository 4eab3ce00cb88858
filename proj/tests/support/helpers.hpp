#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dmc/forest.hpp"
#include "dmc/graph.hpp"
#include "dmc/logsum.hpp"
#include "dmc/model.hpp"
#include "dmc/rng.hpp"
#include "dmc/validate.hpp"

namespace testsupport {

// Replays pre-scripted values; lets tests force specific random outcomes.
class ScriptedRng {
 public:
  std::deque<std::uint64_t> ints;     // consumed by next_below
  std::deque<double> units;           // consumed by next_unit / next_unit_pos
  std::deque<double> gaussians;       // consumed by next_gaussian

  std::uint64_t next_u64() { throw std::logic_error("scripted rng: raw draw"); }
  double next_unit() { return pop(units); }
  double next_unit_pos() { return pop(units); }
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t v = pop(ints);
    if (v >= n) throw std::logic_error("scripted rng: value out of range");
    return v;
  }
  double next_gaussian() { return pop(gaussians); }

 private:
  template <typename T>
  static T pop(std::deque<T>& q) {
    if (q.empty()) throw std::logic_error("scripted rng: script exhausted");
    T v = q.front();
    q.pop_front();
    return v;
  }
};

inline dmc::PpiGraph triangle_graph() {
  return dmc::make_graph({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"A", "C"}});
}

// Forest pairing with the triangle: cherry {A,C} plus singleton B.
inline dmc::DuplicationForest triangle_forest() {
  auto f = dmc::DuplicationForest::singletons({"A", "B"});
  return dmc::expand_leaf(f, "A", "C");
}

// Uniform random simple graph on n vertices labeled g0..g{n-1}.
inline dmc::PpiGraph random_graph(std::size_t n, double edge_prob, dmc::Rng& rng) {
  std::vector<dmc::VertexId> vs;
  for (std::size_t i = 0; i < n; ++i) vs.push_back("g" + std::to_string(i));
  dmc::PpiGraph g;
  for (const auto& v : vs) g.add_vertex(v);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.next_unit() < edge_prob) g.add_edge(vs[i], vs[j]);
    }
  }
  return g;
}

// Valid observation: simulate n_steps of growth and return the endpoint.
inline std::pair<dmc::PpiGraph, dmc::DuplicationForest> simulated_pair(
    const dmc::DmcParams& m, std::size_t n_steps, std::uint64_t seed) {
  dmc::Rng rng(dmc::derive_seed(seed, dmc::stream::kSimulate));
  const auto h = dmc::simulate(m, n_steps, rng);
  return {h.final_graph(), h.final_forest()};
}

// Apply a vertex-label bijection to a graph and forest (internal forest
// nodes keep their ids).
inline dmc::PpiGraph relabel(const dmc::PpiGraph& g,
                             const std::map<dmc::VertexId, dmc::VertexId>& mapping) {
  dmc::PpiGraph out;
  for (const auto& v : g.vertices()) out.add_vertex(mapping.at(v));
  for (const auto& [a, b] : g.edges()) out.add_edge(mapping.at(a), mapping.at(b));
  return out;
}

inline dmc::DuplicationForest relabel(const dmc::DuplicationForest& f,
                                      const std::map<dmc::VertexId, dmc::VertexId>& mapping) {
  auto rename = [&](const dmc::NodeId& id) {
    auto it = mapping.find(id);
    return it == mapping.end() ? id : it->second;
  };
  dmc::DuplicationForest out;
  for (const auto& id : f.node_ids()) out.add_root(rename(id));
  for (const auto& [id, node] : f.nodes()) {
    if (node.parent) out.node_mut(rename(id)).parent = rename(*node.parent);
    for (const auto& c : node.children) {
      out.node_mut(rename(id)).children.push_back(rename(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent likelihood oracle. The production enumerator walks backward and
// scores each merge with the closed-form transition density; this one scores
// each step by generating every forward outcome (3 mutation branches per
// shared neighbor, 2 homodimer branches) from the predecessor state and
// accumulating the probability of outcomes that reproduce the observed next
// graph. Only the basic graph/forest containers are shared.

inline double forward_outcome_prob(const dmc::PpiGraph& g_prev, const dmc::PpiGraph& g_next,
                                   const dmc::VertexId& u, const dmc::VertexId& v,
                                   const dmc::DmcParams& m) {
  // duplication: v copies every edge of u
  dmc::PpiGraph base = g_prev;
  base.add_vertex(v);
  std::vector<dmc::VertexId> shared;
  for (const auto& w : g_prev.neighbors(u)) {
    base.add_edge(v, w);
    shared.push_back(w);
  }

  double total = 0.0;
  // iterate over every mutation/homodimer outcome
  struct Frame {
    std::size_t idx;
    dmc::PpiGraph graph;
    double prob;
  };
  std::vector<Frame> stack{{0, std::move(base), 1.0}};
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    if (fr.idx == shared.size()) {
      dmc::PpiGraph with_dimer = fr.graph;
      with_dimer.add_edge(u, v);
      if (with_dimer == g_next) total += fr.prob * m.p_c;
      if (fr.graph == g_next) total += fr.prob * (1.0 - m.p_c);
      continue;
    }
    const dmc::VertexId& w = shared[fr.idx];
    stack.push_back({fr.idx + 1, fr.graph, fr.prob * m.p});  // keep both
    dmc::PpiGraph drop_anchor = fr.graph;
    drop_anchor.remove_edge(u, w);
    stack.push_back({fr.idx + 1, std::move(drop_anchor), fr.prob * (1.0 - m.p) / 2.0});
    dmc::PpiGraph drop_duplicate = fr.graph;
    drop_duplicate.remove_edge(v, w);
    stack.push_back({fr.idx + 1, std::move(drop_duplicate), fr.prob * (1.0 - m.p) / 2.0});
  }
  return total / static_cast<double>(g_prev.vertex_count());  // uniform anchor choice
}

inline double forward_enum_log_likelihood(const dmc::PpiGraph& g,
                                          const dmc::DuplicationForest& f,
                                          const dmc::DmcParams& m) {
  if (g.vertex_count() == 2) {
    const auto vs = g.vertices();
    return g.has_edge(vs[0], vs[1]) ? 0.0 : dmc::kNegInf;
  }
  std::vector<double> terms;
  for (const dmc::Cherry& c : dmc::cherries(f)) {
    for (const dmc::VertexId& v : {c.left, c.right}) {
      const dmc::VertexId& u = (v == c.left) ? c.right : c.left;
      dmc::PpiGraph g_prev = dmc::contract_duplicate(g, u, v);
      auto [f_prev, anchor] = dmc::contract_cherry(f, v);
      const double step = forward_outcome_prob(g_prev, g, anchor, v, m);
      if (step <= 0.0) continue;
      const double rest = forward_enum_log_likelihood(g_prev, f_prev, m);
      if (rest == dmc::kNegInf) continue;
      terms.push_back(std::log(step) + rest);
    }
  }
  if (terms.empty()) return dmc::kNegInf;
  return dmc::log_sum_exp(terms);
}

}  // namespace testsupport
