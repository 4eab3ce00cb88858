#pragma once

#include <cmath>

#include "dmc/errors.hpp"
#include "dmc/logsum.hpp"
#include "dmc/model.hpp"

namespace dmc {

// Independent uniform prior on [low, high] for each of p and p_c. Bounds are
// required to be strictly inside (0,1) so that every supported parameter is
// a valid inference parameter.
struct UniformPrior {
  double low;
  double high;

  UniformPrior(double low_, double high_) : low(low_), high(high_) {
    if (!(0.0 < low && low < high && high < 1.0)) {
      throw Error(ErrorCode::bad_parameter,
                  "UniformPrior: need 0 < low < high < 1");
    }
  }

  bool contains(const DmcParams& m) const {
    return m.p >= low && m.p <= high && m.p_c >= low && m.p_c <= high;
  }
};

inline double prior_log_density(const UniformPrior& prior, const DmcParams& m) {
  if (!prior.contains(m)) return kNegInf;
  return -2.0 * std::log(prior.high - prior.low);
}

}  // namespace dmc
