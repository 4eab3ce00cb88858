#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dmc/logsum.hpp"
#include "dmc/model.hpp"
#include "dmc/rng.hpp"
#include "dmc/smc.hpp"
#include "dmc/thread_pool.hpp"

namespace dmc {

// Drivers behind the variance-study experiment: simulate one history, then
// estimate the likelihood of every saved prefix repeatedly at several
// particle multipliers. Replicates fan out over a pool; each run draws from
// its own derived stream, and results land in preassigned slots, so the
// output ordering is independent of scheduling.

struct VarianceRun {
  std::size_t t = 0;           // prefix length in growth steps
  std::size_t nodes = 0;       // |V(G_t)|
  std::size_t multiplier = 0;  // c in N = c * |V(G_t)|
  std::size_t n_particles = 0;
  std::size_t rep = 0;
  double log_estimate = 0.0;
};

struct VarianceSummary {
  std::size_t t = 0;
  std::size_t nodes = 0;
  std::size_t multiplier = 0;
  std::size_t n_particles = 0;
  double relative_variance = 0.0;  // sample variance / squared sample mean
};

// Relative variance of exp(log values), shifted so the exponentials never
// overflow: the common factor cancels in the ratio.
inline double relative_variance_from_logs(const std::vector<double>& log_values) {
  if (log_values.size() < 2) {
    throw Error(ErrorCode::bad_parameter, "relative variance needs >= 2 replicates");
  }
  double m = kNegInf;
  for (double v : log_values) m = std::max(m, v);
  if (m == kNegInf) {
    throw Error(ErrorCode::all_zero_weights, "relative variance of all-zero estimates");
  }
  const double n = static_cast<double>(log_values.size());
  double mean = 0.0;
  for (double v : log_values) mean += std::exp(v - m);
  mean /= n;
  double ss = 0.0;
  for (double v : log_values) {
    const double d = std::exp(v - m) - mean;
    ss += d * d;
  }
  const double var = ss / (n - 1.0);
  return var / (mean * mean);
}

struct VarianceStudyResult {
  GrowthHistory history;
  std::vector<VarianceRun> runs;          // ordered by (t, multiplier, rep)
  std::vector<VarianceSummary> summaries; // ordered by (t, multiplier)
};

inline VarianceStudyResult run_variance_study(const DmcParams& m, std::size_t nodes,
                                              const std::vector<std::size_t>& multipliers,
                                              std::size_t reps, std::uint64_t seed,
                                              unsigned threads = 1) {
  if (nodes < 3) {
    throw Error(ErrorCode::bad_parameter, "variance study needs at least 3 nodes");
  }
  if (multipliers.empty()) {
    throw Error(ErrorCode::bad_parameter, "variance study needs at least one multiplier");
  }
  if (reps < 2) {
    throw Error(ErrorCode::bad_parameter, "variance study needs reps >= 2");
  }
  require_interior(m, "run_variance_study");

  VarianceStudyResult out;
  Rng sim_rng(derive_seed(seed, stream::kSimulate));
  out.history = simulate(m, nodes - 2, sim_rng);
  const std::size_t n_steps = out.history.steps.size();

  out.runs.resize(n_steps * multipliers.size() * reps);
  std::size_t slot = 0;
  for (std::size_t t = 1; t <= n_steps; ++t) {
    const std::size_t n_vertices = t + 2;
    for (std::size_t ci = 0; ci < multipliers.size(); ++ci) {
      for (std::size_t rep = 0; rep < reps; ++rep) {
        out.runs[slot++] = VarianceRun{t, n_vertices, multipliers[ci],
                                       multipliers[ci] * n_vertices, rep, 0.0};
      }
    }
  }

  ThreadPool pool(threads);
  pool.parallel_for(out.runs.size(), [&](std::size_t i) {
    VarianceRun& run = out.runs[i];
    const GrowthStep& prefix = out.history.steps[run.t - 1];
    SmcOptions opts;
    const std::size_t ci = run.multiplier;  // tag streams by the multiplier value itself
    opts.seed = derive_seed(seed, stream::kVarianceStudy, run.t, ci, run.rep);
    run.log_estimate = smc_run(prefix.graph_after, prefix.forest_after, m,
                               run.n_particles, opts)
                           .log_estimate;
  });

  std::vector<double> logs;
  logs.reserve(reps);
  for (std::size_t base = 0; base < out.runs.size(); base += reps) {
    logs.clear();
    for (std::size_t r = 0; r < reps; ++r) logs.push_back(out.runs[base + r].log_estimate);
    const VarianceRun& head = out.runs[base];
    out.summaries.push_back(VarianceSummary{head.t, head.nodes, head.multiplier,
                                            head.n_particles,
                                            relative_variance_from_logs(logs)});
  }
  return out;
}

}  // namespace dmc
