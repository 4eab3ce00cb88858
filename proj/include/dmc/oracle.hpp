#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dmc/forest.hpp"
#include "dmc/graph.hpp"
#include "dmc/logsum.hpp"
#include "dmc/model.hpp"
#include "dmc/prior.hpp"
#include "dmc/text_io.hpp"
#include "dmc/validate.hpp"

namespace dmc {

inline constexpr std::size_t kExactSizeGuard = 12;

struct ExactOptions {
  bool memoize = false;  // off by default so every path is visibly enumerated
};

namespace detail {

inline double exact_log_likelihood_rec(const PpiGraph& g, const DuplicationForest& f,
                                       const DmcParams& m,
                                       std::map<std::string, double>* memo) {
  if (g.vertex_count() == 2) {
    return seed_log_prob(g);
  }
  std::string key;
  if (memo) {
    key = serialize_graph(g) + "|" + serialize_forest(f);
    if (auto it = memo->find(key); it != memo->end()) return it->second;
  }
  std::vector<double> terms;
  for (const Cherry& c : cherries(f)) {
    for (const VertexId& v : {c.left, c.right}) {
      const VertexId& u = (v == c.left) ? c.right : c.left;
      PpiGraph g_prev = contract_duplicate(g, u, v);
      auto [f_prev, anchor] = contract_cherry(f, v);
      const double step = transition_log_prob(g_prev, g, anchor, v, m);
      const double rest = exact_log_likelihood_rec(g_prev, f_prev, m, memo);
      terms.push_back(step + rest);
    }
  }
  const double value = log_sum_exp(terms);
  if (memo) memo->emplace(std::move(key), value);
  return value;
}

}  // namespace detail

// Exact log-likelihood by depth-first enumeration of every ordered duplicate
// sequence (each cherry leaf at every backward step). Feasible for small
// observations only; the guard keeps callers honest.
inline double exact_log_likelihood(const PpiGraph& g, const DuplicationForest& f,
                                   const DmcParams& m, const ExactOptions& opts = {}) {
  require_valid_pair(g, f);
  require_interior(m, "exact_log_likelihood");
  if (g.vertex_count() < 2 || g.vertex_count() - 2 > kExactSizeGuard) {
    throw Error(ErrorCode::size_guard,
                "exact_log_likelihood: instance has " +
                    std::to_string(g.vertex_count() - 2) + " growth steps (guard " +
                    std::to_string(kExactSizeGuard) + "); use the SMC estimate instead");
  }
  std::map<std::string, double> memo;
  return detail::exact_log_likelihood_rec(g, f, m, opts.memoize ? &memo : nullptr);
}

// Posterior mass tabulated on a regular lattice of cell midpoints over the
// prior support. Masses are normalized by the lattice sum.
struct GridPosterior {
  std::size_t grid_size = 0;
  std::vector<DmcParams> grid;        // row-major, p outer, p_c inner
  std::vector<double> log_posterior;  // normalized log-mass per point
  std::pair<double, double> marginal_means{0.0, 0.0};

  double cell_width(const UniformPrior& prior) const {
    return (prior.high - prior.low) / static_cast<double>(grid_size);
  }
};

inline GridPosterior grid_posterior(const PpiGraph& g, const DuplicationForest& f,
                                    const UniformPrior& prior, std::size_t grid_size,
                                    const ExactOptions& opts = {}) {
  if (grid_size < 2) {
    throw Error(ErrorCode::bad_parameter, "grid_posterior: grid_size must be >= 2");
  }
  GridPosterior out;
  out.grid_size = grid_size;
  const double width = (prior.high - prior.low) / static_cast<double>(grid_size);
  out.grid.reserve(grid_size * grid_size);
  out.log_posterior.reserve(grid_size * grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    for (std::size_t j = 0; j < grid_size; ++j) {
      const DmcParams m{prior.low + (static_cast<double>(i) + 0.5) * width,
                        prior.low + (static_cast<double>(j) + 0.5) * width};
      out.grid.push_back(m);
      // uniform prior: constant log-density cancels in the normalization
      out.log_posterior.push_back(exact_log_likelihood(g, f, m, opts));
    }
  }
  const double norm = log_sum_exp(out.log_posterior);
  if (norm == kNegInf) {
    throw Error(ErrorCode::all_zero_weights, "grid_posterior: likelihood is zero everywhere");
  }
  double mean_p = 0.0, mean_pc = 0.0;
  for (std::size_t k = 0; k < out.log_posterior.size(); ++k) {
    out.log_posterior[k] -= norm;
    const double mass = std::exp(out.log_posterior[k]);
    mean_p += mass * out.grid[k].p;
    mean_pc += mass * out.grid[k].p_c;
  }
  out.marginal_means = {mean_p, mean_pc};
  return out;
}

}  // namespace dmc
