#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <initializer_list>

namespace dmc {

namespace detail {

// SplitMix64 finalizer (Vigna / Steele et al.). Full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace detail

// Hash a (seed, tag...) tuple into a fresh stream seed. Streams for distinct
// tag tuples are statistically independent, which is what makes parallel and
// sequential execution produce identical draws: every consumer derives its
// own stream from the master seed instead of sharing one sequence.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = detail::mix64(seed + detail::kGolden);
  for (std::uint64_t t : tags) {
    h = detail::mix64(h ^ detail::mix64(t + detail::kGolden));
  }
  return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a) {
  return derive_seed(seed, {a});
}
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                           std::uint64_t b) {
  return derive_seed(seed, {a, b});
}
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                           std::uint64_t b, std::uint64_t c) {
  return derive_seed(seed, {a, b, c});
}
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                           std::uint64_t b, std::uint64_t c,
                                           std::uint64_t d) {
  return derive_seed(seed, {a, b, c, d});
}

// Counter-based generator: state advances by a fixed odd increment and the
// output is the mixed counter (SplitMix64). Chosen over std::mt19937_64
// because the raw stream and all derived variates are reproducible across
// standard libraries and because seeding a new independent stream is O(1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform on [0,1), 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe input for log().
  double next_unit_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Unbiased uniform on {0, ..., n-1} via rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal, one Box-Muller draw per call (no cached twin, so the
  // stream position is a pure function of the call count).
  double next_gaussian() {
    const double u1 = next_unit_pos();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t state_;
};

// Anything the randomized algorithms draw from. Tests substitute scripted
// sources to force specific outcomes.
template <typename R>
concept RandomSource = requires(R r, std::uint64_t n) {
  { r.next_u64() } -> std::convertible_to<std::uint64_t>;
  { r.next_unit() } -> std::convertible_to<double>;
  { r.next_unit_pos() } -> std::convertible_to<double>;
  { r.next_below(n) } -> std::convertible_to<std::uint64_t>;
  { r.next_gaussian() } -> std::convertible_to<double>;
};

// Stream tags. Every randomized component owns a distinct top-level tag so
// seeds never collide across components.
namespace stream {
inline constexpr std::uint64_t kSimulate = 1;
inline constexpr std::uint64_t kSmcPropose = 2;
inline constexpr std::uint64_t kSmcResample = 3;
inline constexpr std::uint64_t kPmmhInit = 4;
inline constexpr std::uint64_t kPmmhIter = 5;
inline constexpr std::uint64_t kPmmhPropose = 6;
inline constexpr std::uint64_t kPmmhAccept = 7;
inline constexpr std::uint64_t kPmmhSelect = 8;
inline constexpr std::uint64_t kPmmhSmc = 9;
inline constexpr std::uint64_t kVarianceStudy = 10;
}  // namespace stream

}  // namespace dmc
