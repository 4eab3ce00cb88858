#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "dmc/logsum.hpp"
#include "dmc/model.hpp"
#include "dmc/prior.hpp"
#include "dmc/rng.hpp"
#include "dmc/smc.hpp"
#include "dmc/thread_pool.hpp"
#include "dmc/validate.hpp"

namespace dmc {

// Particle marginal Metropolis-Hastings on (p, p_c): a random-walk chain in
// parameter space whose intractable likelihood is replaced by the SMC
// estimate. The estimate is unbiased, so the chain targets the exact
// parameter posterior despite the noise.

struct PmmhConfig {
  std::size_t n_particles = 2000;
  std::size_t n_iters = 10000;
  double rw_sigma = 0.05;
  bool record_histories = false;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;
  std::size_t max_init_redraws = 100;
};

struct PmmhSample {
  std::size_t iter = 0;
  double p = 0.0;
  double p_c = 0.0;
  double log_lik_estimate = 0.0;
  bool accepted = false;
  // selected particle's duplicate/anchor pairs, most recent merge first
  std::optional<std::vector<std::pair<VertexId, VertexId>>> history;
};

// Counters for tests and logs; not part of the chain output.
struct PmmhStats {
  std::size_t smc_calls = 0;
  std::size_t accepted = 0;
  std::size_t init_redraws = 0;
};

// Gaussian step reflected into the prior support; reflection is an
// involution, so q stays symmetric and cancels from the acceptance ratio.
template <RandomSource R>
DmcParams rw_propose(const DmcParams& m, double sigma, const UniformPrior& prior, R& rng) {
  auto reflect = [&](double x) {
    const double span = prior.high - prior.low;
    double y = std::fmod(x - prior.low, 2.0 * span);
    if (y < 0.0) y += 2.0 * span;
    return prior.low + std::min(y, 2.0 * span - y);
  };
  return DmcParams{reflect(m.p + sigma * rng.next_gaussian()),
                   reflect(m.p_c + sigma * rng.next_gaussian())};
}

// log of the Metropolis acceptance probability, capped at 0. The proposal is
// symmetric so its ratio cancels; the prior ratio enters the general
// pseudo-marginal form (it is identically zero for a uniform prior with both
// points in support).
inline double accept_log_ratio(double log_lik_star, double log_lik_curr, double prior_star,
                               double prior_curr) {
  if (log_lik_curr == kNegInf) {
    throw Error(ErrorCode::bad_parameter, "accept_log_ratio: current likelihood is zero");
  }
  if (prior_star == kNegInf || log_lik_star == kNegInf) return kNegInf;
  return std::min(0.0, (log_lik_star + prior_star) - (log_lik_curr + prior_curr));
}

namespace detail {

// Pick one particle index with probability proportional to the final-step
// un-normalized weights.
template <RandomSource R>
std::size_t select_particle(const std::vector<double>& final_log_weights, R& rng) {
  const double shift = log_sum_exp(final_log_weights);
  if (shift == kNegInf) return 0;
  double total = 0.0;
  std::vector<double> cumulative(final_log_weights.size());
  for (std::size_t i = 0; i < final_log_weights.size(); ++i) {
    total += std::exp(final_log_weights[i] - shift);
    cumulative[i] = total;
  }
  const double u = rng.next_unit() * total;
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    if (u < cumulative[i]) return i;
  }
  return cumulative.size() - 1;
}

}  // namespace detail

// Generic pseudo-marginal chain over a supplied likelihood-estimate callback:
// estimate(m, call_id) -> (log estimate, optional history). call_id is unique
// per likelihood evaluation so callers can derive independent randomness for
// each. Exposed so tests can substitute a constant likelihood and check that
// the chain samples the prior; pmmh_run wires in the SMC.
template <typename EstimateFn>
std::vector<PmmhSample> pmmh_chain(EstimateFn&& estimate, const UniformPrior& prior,
                                   const PmmhConfig& cfg, PmmhStats* stats = nullptr) {
  std::vector<PmmhSample> chain;
  chain.reserve(cfg.n_iters + 1);

  PmmhStats local;
  PmmhStats& st = stats ? *stats : local;
  std::size_t call_id = 0;

  // initial state from the prior, redrawn while the estimate is zero
  PmmhSample cur;
  bool ok = false;
  for (std::size_t attempt = 0; attempt <= cfg.max_init_redraws; ++attempt) {
    Rng init_rng(derive_seed(cfg.master_seed, stream::kPmmhInit, attempt));
    const DmcParams m0{prior.low + (prior.high - prior.low) * init_rng.next_unit(),
                       prior.low + (prior.high - prior.low) * init_rng.next_unit()};
    auto [ll, hist] = estimate(m0, call_id++);
    ++st.smc_calls;
    st.init_redraws = attempt;
    if (ll > kNegInf) {
      cur = PmmhSample{0, m0.p, m0.p_c, ll, true, std::move(hist)};
      ok = true;
      break;
    }
  }
  if (!ok) {
    throw Error(ErrorCode::unlucky_start,
                "pmmh: likelihood estimate was zero for every initial draw");
  }
  chain.push_back(cur);

  for (std::size_t r = 1; r <= cfg.n_iters; ++r) {
    const std::uint64_t iter_seed = derive_seed(cfg.master_seed, stream::kPmmhIter, r);
    Rng prop_rng(derive_seed(iter_seed, stream::kPmmhPropose));
    Rng accept_rng(derive_seed(iter_seed, stream::kPmmhAccept));

    const DmcParams m_cur{cur.p, cur.p_c};
    const DmcParams m_star = rw_propose(m_cur, cfg.rw_sigma, prior, prop_rng);
    auto [ll_star, hist_star] = estimate(m_star, call_id++);
    ++st.smc_calls;

    const double log_alpha =
        accept_log_ratio(ll_star, cur.log_lik_estimate, prior_log_density(prior, m_star),
                         prior_log_density(prior, m_cur));
    const bool accept = std::log(accept_rng.next_unit_pos()) <= log_alpha;
    if (accept) {
      cur = PmmhSample{r, m_star.p, m_star.p_c, ll_star, true, std::move(hist_star)};
      ++st.accepted;
    } else {
      // carry the previous state forward, estimate included: re-estimating
      // here would break the pseudo-marginal target
      cur.iter = r;
      cur.accepted = false;
    }
    chain.push_back(cur);
  }
  return chain;
}

// Algorithm: SMC-within-MH on an observed (graph, forest) pair.
inline std::vector<PmmhSample> pmmh_run(const PpiGraph& g, const DuplicationForest& f,
                                        const UniformPrior& prior, const PmmhConfig& cfg,
                                        PmmhStats* stats = nullptr) {
  require_valid_pair(g, f);
  if (g.vertex_count() == 2) {
    throw Error(ErrorCode::seed_graph_input, "pmmh_run: observed graph is a seed graph");
  }
  if (cfg.n_particles < 1 || cfg.rw_sigma <= 0.0) {
    throw Error(ErrorCode::bad_parameter, "pmmh_run: bad configuration");
  }

  std::unique_ptr<ThreadPool> pool;
  if (cfg.threads > 1) pool = std::make_unique<ThreadPool>(cfg.threads);

  auto estimate = [&](const DmcParams& m, std::size_t call_id)
      -> std::pair<double, std::optional<std::vector<std::pair<VertexId, VertexId>>>> {
    SmcOptions opts;
    opts.seed = derive_seed(cfg.master_seed, stream::kPmmhSmc, call_id);
    opts.pool = pool.get();
    const SmcResult res = smc_run(g, f, m, cfg.n_particles, opts);
    std::optional<std::vector<std::pair<VertexId, VertexId>>> hist;
    if (cfg.record_histories && res.log_estimate > kNegInf) {
      Rng select_rng(derive_seed(cfg.master_seed, stream::kPmmhSelect, call_id));
      const std::size_t l = detail::select_particle(res.final_log_weights, select_rng);
      hist = res.final_particles[l].trace;
    }
    return {res.log_estimate, std::move(hist)};
  };
  return pmmh_chain(estimate, prior, cfg, stats);
}

// Biased-normalized autocorrelation estimates at lags 0..max_lag.
inline std::vector<double> acf(const std::vector<double>& values, std::size_t max_lag) {
  if (values.size() <= max_lag) {
    throw Error(ErrorCode::bad_parameter, "acf: chain shorter than max_lag");
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double denom = 0.0;
  for (double v : values) denom += (v - mean) * (v - mean);
  if (denom == 0.0) {
    throw Error(ErrorCode::zero_variance, "acf: chain has zero variance");
  }
  std::vector<double> out(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < values.size(); ++t) {
      acc += (values[t] - mean) * (values[t + lag] - mean);
    }
    out[lag] = acc / denom;
  }
  return out;
}

struct ChainSummary {
  std::size_t n_samples = 0;  // post burn-in
  std::size_t burn_in = 0;
  double mean_p = 0.0, sd_p = 0.0;
  double mean_pc = 0.0, sd_pc = 0.0;
  double acceptance_rate = 0.0;
  std::vector<double> acf_p;   // lags 0..max_lag
  std::vector<double> acf_pc;

  double acf_p_at(std::size_t lag) const { return acf_p.at(lag); }
  double acf_pc_at(std::size_t lag) const { return acf_pc.at(lag); }
};

inline ChainSummary summarize(const std::vector<PmmhSample>& chain, std::size_t burn_in,
                              std::size_t max_acf_lag = 50) {
  if (chain.empty()) {
    throw Error(ErrorCode::empty_input, "summarize: empty chain");
  }
  if (burn_in >= chain.size()) {
    throw Error(ErrorCode::bad_parameter, "summarize: burn_in >= chain length");
  }
  ChainSummary s;
  s.burn_in = burn_in;
  std::vector<double> ps, pcs;
  std::size_t accepted = 0;
  for (std::size_t i = burn_in; i < chain.size(); ++i) {
    ps.push_back(chain[i].p);
    pcs.push_back(chain[i].p_c);
    accepted += chain[i].accepted ? 1 : 0;
  }
  s.n_samples = ps.size();
  auto moments = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = xs.size() > 1 ? ss / static_cast<double>(xs.size() - 1) : 0.0;
    return std::pair{mean, std::sqrt(var)};
  };
  std::tie(s.mean_p, s.sd_p) = moments(ps);
  std::tie(s.mean_pc, s.sd_pc) = moments(pcs);
  s.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(s.n_samples);
  const std::size_t lag = std::min(max_acf_lag, s.n_samples - 1);
  if (s.n_samples > 1 && s.sd_p > 0.0) s.acf_p = acf(ps, lag);
  if (s.n_samples > 1 && s.sd_pc > 0.0) s.acf_pc = acf(pcs, lag);
  return s;
}

}  // namespace dmc
