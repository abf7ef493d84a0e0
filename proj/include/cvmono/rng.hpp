#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random numbers: every draw is a pure function of
// (seed, counter), so substreams derived for parallel work reproduce the
// same values regardless of scheduling or evaluation order.

namespace cvmono::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

/// Hash of (seed, counter); the splitmix64 output function over an
/// arbitrarily indexed state.
inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + kGolden * (counter + 1));
}

/// Derive an independent substream seed (per trial, per batch, ...).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x5851F42D4C957F2DULL));
}

/// Uniform in (0,1), never exactly 0 or 1.
inline double u01(std::uint64_t seed, std::uint64_t counter) {
  return (static_cast<double>(at(seed, counter) >> 11) + 0.5) * 0x1p-53;
}

/// Standard normal via Box-Muller; consumes counters 2c and 2c+1.
inline double normal(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = u01(seed, 2 * counter);
  const double u2 = u01(seed, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Sequential convenience wrapper over the counter scheme.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : seed_(seed) {}

  double u01() { return rng::u01(seed_, next_++); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }
  double exponential() { return -std::log(u01()); }  // mean 1
  std::uint64_t integer(std::uint64_t n) {  // in [0, n)
    return static_cast<std::uint64_t>(u01() * static_cast<double>(n)) % n;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t next_ = 0;
};

}  // namespace cvmono::rng
