#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "dmc/errors.hpp"

namespace dmc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(v))) with max-shift; -inf entries contribute nothing.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::empty_input, "log_sum_exp: empty list");
  }
  double m = kNegInf;
  for (double v : values) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

// log((1/N) sum(exp(v))). Exact (no rounding through exp/log) when all
// entries are identical, which the zero-variance tests rely on.
inline double log_mean_exp(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::empty_input, "log_mean_exp: empty list");
  }
  double m = kNegInf;
  for (double v : values) m = std::max(m, v);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc / static_cast<double>(values.size()));
}

}  // namespace dmc
