#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmc/compact.hpp"
#include "dmc/forest.hpp"
#include "dmc/graph.hpp"
#include "dmc/logsum.hpp"
#include "dmc/model.hpp"
#include "dmc/rng.hpp"
#include "dmc/thread_pool.hpp"
#include "dmc/validate.hpp"

namespace dmc {

// Backward SMC over duplicate-node sequences. Each particle walks the
// observed (G, Gamma) back to the seed, proposing uniformly over the ordered
// (cherry, leaf) choices; the product of per-step mean weights is an
// unbiased estimate of the likelihood summed over ordered duplicate
// sequences. The ordered sum is 2^n times the unordered-cherry sum; the
// factor is parameter-independent, so posteriors over (p, p_c) are
// unaffected. The exact enumeration in oracle.hpp targets the same ordered
// sum, so the two are directly comparable.

// One reconstructed backward path. trace holds (duplicate, anchor) pairs,
// most recent merge first, i.e. trace.front() is the merge that produced the
// seed.
struct Particle {
  PpiGraph graph;
  DuplicationForest forest;
  std::vector<std::pair<VertexId, VertexId>> trace;
};

struct SmcResult {
  double log_estimate = 0.0;                        // log p-hat
  std::vector<double> step_log_means;               // per-step log[(1/N) sum W]
  std::vector<Particle> final_particles;
  std::vector<std::vector<std::uint32_t>> ancestry; // resampled parent indices per step
  std::vector<double> ess_per_step;
  std::vector<double> final_log_weights;            // last step's un-normalized weights
};

enum class Resampling {
  kMultinomial,  // independent draws; the default everywhere
  kSystematic,   // lower-variance alternative for variance studies, opt-in
};

struct SmcOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Resampling resampling = Resampling::kMultinomial;
  ThreadPool* pool = nullptr;  // optional externally owned pool
};

// Uniform proposal over the 2C ordered (cherry, leaf) choices of f.
// Returns the proposed duplicate leaf and log q = -log(2C).
template <RandomSource R>
std::pair<VertexId, double> propose_duplicate(const DuplicationForest& f, R& rng) {
  const auto ch = cherries(f);
  if (ch.empty()) {
    throw Error(ErrorCode::no_cherry, "propose_duplicate: forest has no cherry");
  }
  const std::uint64_t k = rng.next_below(2 * ch.size());
  const Cherry& c = ch[k / 2];
  const VertexId& v = (k % 2 == 0) ? c.left : c.right;
  return {v, -std::log(2.0 * static_cast<double>(ch.size()))};
}

// N independent draws from the normalized weight vector; returns 0-based
// parent indices.
template <RandomSource R>
std::vector<std::uint32_t> multinomial_resample(std::span<const double> weights, R& rng) {
  if (weights.empty()) {
    throw Error(ErrorCode::empty_input, "multinomial_resample: no weights");
  }
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0 || !std::isfinite(weights[i])) {
      throw Error(ErrorCode::bad_parameter, "multinomial_resample: bad weight");
    }
    total += weights[i];
    cumulative[i] = total;
  }
  if (total <= 0.0) {
    throw Error(ErrorCode::all_zero_weights, "multinomial_resample: all weights zero");
  }
  std::vector<std::uint32_t> out(weights.size());
  for (auto& idx : out) {
    const double u = rng.next_unit() * total;
    std::size_t lo = 0, hi = weights.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    idx = static_cast<std::uint32_t>(lo);
  }
  return out;
}

// Single sorted-stride pass; lower variance than multinomial but not what
// the estimator contract specifies, hence opt-in.
template <RandomSource R>
std::vector<std::uint32_t> systematic_resample(std::span<const double> weights, R& rng) {
  if (weights.empty()) {
    throw Error(ErrorCode::empty_input, "systematic_resample: no weights");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (total <= 0.0) {
    throw Error(ErrorCode::all_zero_weights, "systematic_resample: all weights zero");
  }
  const std::size_t n = weights.size();
  std::vector<std::uint32_t> out(n);
  const double step = total / static_cast<double>(n);
  double u = rng.next_unit() * step;
  double cum = weights[0];
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (cum < u && j + 1 < n) cum += weights[++j];
    out[i] = static_cast<std::uint32_t>(j);
    u += step;
  }
  return out;
}

namespace detail {

struct CompactParticle {
  CompactState state;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> merges;  // (duplicate, anchor), oldest first
};

inline double ess_from_log_weights(std::span<const double> logw, double log_sum) {
  if (log_sum == kNegInf) return 0.0;
  double acc = 0.0;
  for (double w : logw) {
    const double nw = std::exp(w - log_sum);
    acc += nw * nw;
  }
  return acc > 0.0 ? 1.0 / acc : 0.0;
}

}  // namespace detail

// Run the backward SMC with n_particles particles. Per-particle randomness
// is drawn from streams derived as (seed, kSmcPropose, t, i), so the result
// is a pure function of the options regardless of thread count.
inline SmcResult smc_run(const PpiGraph& g, const DuplicationForest& f, const DmcParams& m,
                         std::size_t n_particles, const SmcOptions& opts = {}) {
  require_valid_pair(g, f);
  require_interior(m, "smc_run");
  if (n_particles < 1) {
    throw Error(ErrorCode::bad_parameter, "smc_run: need at least one particle");
  }
  if (g.vertex_count() == 2) {
    throw Error(ErrorCode::seed_graph_input, "smc_run: observed graph is a seed graph");
  }

  auto [tables, init] = CompactState::build(g, f);
  const std::size_t n_steps = g.vertex_count() - 2;
  const std::size_t N = n_particles;

  std::vector<detail::CompactParticle> cur(N, detail::CompactParticle{init, {}});
  std::vector<detail::CompactParticle> next(cur);
  std::vector<double> log_weights(N, 0.0);
  std::vector<double> linear_weights(N, 0.0);

  SmcResult res;
  res.step_log_means.reserve(n_steps);
  res.ess_per_step.reserve(n_steps);

  std::unique_ptr<ThreadPool> own_pool;
  ThreadPool* pool = opts.pool;
  if (!pool && opts.threads > 1) {
    own_pool = std::make_unique<ThreadPool>(opts.threads);
    pool = own_pool.get();
  }

  // scratch cherry buffers, one per lane to avoid sharing
  const unsigned lanes = pool ? pool->width() : 1;
  std::vector<std::vector<std::uint32_t>> scratch(std::max(1u, lanes));

  bool aborted = false;
  for (std::size_t step = 0; step < n_steps; ++step) {
    const std::uint64_t t = n_steps - step;  // backward time index: n, n-1, ..., 1

    if (step > 0) {
      // normalize the previous step's weights and resample parents
      const double shift = log_sum_exp(log_weights);
      if (shift == kNegInf) {
        aborted = true;
        break;
      }
      for (std::size_t i = 0; i < N; ++i) {
        linear_weights[i] = std::exp(log_weights[i] - shift);
      }
      Rng resample_rng(derive_seed(opts.seed, stream::kSmcResample, t));
      auto parents = (opts.resampling == Resampling::kMultinomial)
                         ? multinomial_resample(std::span<const double>(linear_weights),
                                                resample_rng)
                         : systematic_resample(std::span<const double>(linear_weights),
                                               resample_rng);
      for (std::size_t i = 0; i < N; ++i) next[i] = cur[parents[i]];
      std::swap(cur, next);
      res.ancestry.push_back(std::move(parents));
    }

    auto advance = [&](std::size_t i, std::vector<std::uint32_t>& cherry_buf) {
      detail::CompactParticle& pt = cur[i];
      Rng rng(derive_seed(opts.seed, stream::kSmcPropose, t, i));
      pt.state.collect_cherries(tables, cherry_buf);
      const std::uint64_t k = rng.next_below(2 * cherry_buf.size());
      const auto kids = pt.state.children_of(cherry_buf[k / 2]);
      const std::uint32_t v_node = kids[k % 2];
      const std::uint32_t u_node = kids[1 - (k % 2)];
      const std::uint32_t v = pt.state.leaf_vertex(v_node);
      const std::uint32_t u = pt.state.leaf_vertex(u_node);
      const double log_q = -std::log(2.0 * static_cast<double>(cherry_buf.size()));
      double w = pt.state.merge_log_prob(tables, u, v, m) - log_q;
      pt.state.contract(tables, u, v);
      pt.merges.emplace_back(v, u);
      if (t == 1) {
        const auto [a, b] = pt.state.final_vertices(tables);
        if (!pt.state.has_edge(tables, a, b)) w = kNegInf;  // seed density of a disconnected pair
      }
      log_weights[i] = w;
    };

    if (pool && N > 1) {
      const unsigned width = pool->width();
      pool->parallel_for(N, [&](std::size_t i) {
        const std::size_t chunk = (N + width - 1) / width;
        advance(i, scratch[i / chunk]);
      });
    } else {
      for (std::size_t i = 0; i < N; ++i) advance(i, scratch[0]);
    }

    const double step_mean = log_mean_exp(log_weights);
    res.step_log_means.push_back(step_mean);
    res.ess_per_step.push_back(
        detail::ess_from_log_weights(log_weights, log_sum_exp(log_weights)));
    if (step_mean == kNegInf) {
      aborted = true;
      break;
    }
  }

  double total = 0.0;
  for (double v : res.step_log_means) total += v;
  res.log_estimate = aborted ? kNegInf : total;

  res.final_log_weights = log_weights;
  res.final_particles.reserve(N);
  for (const auto& pt : cur) {
    Particle out;
    out.graph = pt.state.to_graph(tables);
    out.forest = pt.state.to_forest(tables);
    out.trace.reserve(pt.merges.size());
    for (auto it = pt.merges.rbegin(); it != pt.merges.rend(); ++it) {
      out.trace.emplace_back(tables.vertex_ids[it->first], tables.vertex_ids[it->second]);
    }
    res.final_particles.push_back(std::move(out));
  }
  return res;
}

}  // namespace dmc
