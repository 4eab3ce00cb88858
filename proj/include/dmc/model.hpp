#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dmc/errors.hpp"
#include "dmc/forest.hpp"
#include "dmc/graph.hpp"
#include "dmc/logsum.hpp"
#include "dmc/rng.hpp"
#include "dmc/validate.hpp"

namespace dmc {

// Model parameters M = (p, p_c): edge-retention probability of the mutation
// step and the homodimerization probability.
struct DmcParams {
  double p = 0.5;
  double p_c = 0.5;

  bool in_unit_interval() const { return p >= 0.0 && p <= 1.0 && p_c >= 0.0 && p_c <= 1.0; }
  bool interior() const { return p > 0.0 && p < 1.0 && p_c > 0.0 && p_c < 1.0; }
};

// Inference entry points refuse boundary parameters: a zero factor turns
// every weight to -inf and the failure mode is silent.
inline void require_interior(const DmcParams& m, const char* where) {
  if (!m.interior()) {
    throw Error(ErrorCode::boundary_params,
                std::string(where) + ": parameters must lie strictly inside (0,1)");
  }
}

// One growth event: anchor duplicated into `duplicate`, resulting state
// attached for history replay.
struct GrowthStep {
  VertexId anchor;
  VertexId duplicate;
  PpiGraph graph_after;
  DuplicationForest forest_after;
};

struct GrowthHistory {
  PpiGraph seed_graph;
  DuplicationForest seed_forest;
  std::vector<GrowthStep> steps;

  const PpiGraph& final_graph() const {
    return steps.empty() ? seed_graph : steps.back().graph_after;
  }
  const DuplicationForest& final_forest() const {
    return steps.empty() ? seed_forest : steps.back().forest_after;
  }
};

// First id of the form x<k>, k >= |V|+1, that is not already taken.
inline VertexId fresh_vertex_id(const PpiGraph& g) {
  std::size_t k = g.vertex_count() + 1;
  while (g.has_vertex("x" + std::to_string(k))) ++k;
  return "x" + std::to_string(k);
}

// One forward DMC step. Draw order is pinned for reproducibility: anchor
// index first, then per sorted neighbor one keep/delete draw and one
// which-edge draw (both always consumed), then the homodimer draw.
template <RandomSource R>
GrowthStep forward_step(const PpiGraph& g, const DuplicationForest& f, const DmcParams& m,
                        R& rng, std::optional<VertexId> duplicate_id = std::nullopt) {
  require_valid_pair(g, f);
  if (!m.in_unit_interval()) {
    throw Error(ErrorCode::bad_parameter, "forward_step: parameters outside [0,1]");
  }

  const auto vertices = g.vertices();
  const VertexId u = vertices[rng.next_below(vertices.size())];
  const VertexId v = duplicate_id ? *duplicate_id : fresh_vertex_id(g);
  if (g.has_vertex(v)) {
    throw Error(ErrorCode::duplicate_vertex, "duplicate id already in graph: " + v);
  }

  PpiGraph next = g;
  next.add_vertex(v);
  for (const auto& w : g.neighbors(u)) {
    next.add_edge(v, w);
  }
  for (const auto& w : g.neighbors(u)) {
    const bool keep_both = rng.next_unit() < m.p;
    const bool delete_anchor_edge = rng.next_unit() < 0.5;
    if (!keep_both) {
      next.remove_edge(delete_anchor_edge ? u : v, w);
    }
  }
  if (rng.next_unit() < m.p_c) {
    next.add_edge(u, v);
  }

  return GrowthStep{u, v, std::move(next), expand_leaf(f, u, v)};
}

// Shared final arithmetic for the one-step transition density, so the labeled
// and the index-based evaluation paths produce bit-identical values.
//
//   (1/|V(G_{t-1})|) * p^k_both * ((1-p)/2)^k_one * h
//
// k_both / k_one count previous neighbors of the anchor that kept both /
// exactly one of the duplicated edges; h is the homodimer factor.
inline double transition_log_prob_from_counts(std::size_t n_prev_vertices, std::size_t k_both,
                                              std::size_t k_one, bool homodimer,
                                              const DmcParams& m) {
  double lp = -std::log(static_cast<double>(n_prev_vertices));
  if (k_both > 0) {
    if (m.p == 0.0) return kNegInf;
    lp += static_cast<double>(k_both) * std::log(m.p);
  }
  if (k_one > 0) {
    if (m.p == 1.0) return kNegInf;
    lp += static_cast<double>(k_one) * std::log((1.0 - m.p) / 2.0);
  }
  const double h = homodimer ? m.p_c : 1.0 - m.p_c;
  if (h == 0.0) return kNegInf;
  lp += std::log(h);
  return lp;
}

// Exact log-density of one DMC transition from g_prev to g_next with anchor u
// and duplicate v. Requires g_prev to equal the backward contraction of
// g_next; the value is invariant under swapping the roles of u and v.
inline double transition_log_prob(const PpiGraph& g_prev, const PpiGraph& g_next,
                                  const VertexId& u, const VertexId& v, const DmcParams& m) {
  if (!g_next.has_vertex(u) || !g_next.has_vertex(v)) {
    throw Error(ErrorCode::unknown_vertex, "transition_log_prob: u or v not in g_next");
  }
  if (contract_duplicate(g_next, u, v) != g_prev) {
    throw Error(ErrorCode::precondition_violation,
                "transition_log_prob: g_prev is not the contraction of g_next");
  }
  std::size_t k_both = 0, k_one = 0;
  for (const auto& w : g_prev.neighbors(u)) {
    const bool eu = g_next.has_edge(u, w);
    const bool ev = g_next.has_edge(v, w);
    if (eu && ev) {
      ++k_both;
    } else if (eu || ev) {
      ++k_one;
    } else {
      return kNegInf;  // unreachable when the precondition holds
    }
  }
  return transition_log_prob_from_counts(g_prev.vertex_count(), k_both, k_one,
                                         g_next.has_edge(u, v), m);
}

// Deterministic backward operator: given the duplicate leaf v, recover the
// anchor from the forest and undo one growth step on both structures.
inline std::tuple<PpiGraph, DuplicationForest, VertexId> backward_step(
    const PpiGraph& g, const DuplicationForest& f, const VertexId& v) {
  require_valid_pair(g, f);
  auto [forest_prev, u] = contract_cherry(f, v);
  PpiGraph graph_prev = contract_duplicate(g, u, v);
  return {std::move(graph_prev), std::move(forest_prev), u};
}

// Log-density of the seed: the model starts from the two-node connected
// graph, so that state has probability one and everything else is impossible.
inline double seed_log_prob(const PpiGraph& g) {
  if (g.vertex_count() != 2) {
    throw Error(ErrorCode::wrong_seed_size,
                "seed_log_prob: graph has " + std::to_string(g.vertex_count()) +
                    " vertices (need 2)");
  }
  const auto vs = g.vertices();
  return g.has_edge(vs[0], vs[1]) ? 0.0 : kNegInf;
}

// Grow a history of n_steps events from the standard seed {s1-s2}. Fresh
// duplicates are named x3, x4, ... in creation order.
template <RandomSource R>
GrowthHistory simulate(const DmcParams& m, std::size_t n_steps, R& rng) {
  GrowthHistory h;
  h.seed_graph = make_graph({"s1", "s2"}, {{"s1", "s2"}});
  h.seed_forest = DuplicationForest::singletons({"s1", "s2"});
  const PpiGraph* g = &h.seed_graph;
  const DuplicationForest* f = &h.seed_forest;
  h.steps.reserve(n_steps);
  for (std::size_t t = 0; t < n_steps; ++t) {
    h.steps.push_back(forward_step(*g, *f, m, rng));
    g = &h.steps.back().graph_after;
    f = &h.steps.back().forest_after;
  }
  return h;
}

}  // namespace dmc
