#ifndef OBSTRUCTA_NUM_HPP
#define OBSTRUCTA_NUM_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace obstructa {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative can land exactly on 2*pi after the correction
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Shortest arc length between two angles.
inline double angle_distance(double a, double b) {
  double d = std::fabs(wrap_angle(a) - wrap_angle(b));
  return d > kTwoPi / 2.0 ? kTwoPi - d : d;
}

/// Wrap a signed angle increment into (-pi, pi].
inline double wrap_increment(double d) {
  double r = std::fmod(d, kTwoPi);
  if (r > kTwoPi / 2.0) r -= kTwoPi;
  if (r <= -kTwoPi / 2.0) r += kTwoPi;
  return r;
}

/// SplitMix64: tiny deterministic generator, identical on every platform.
/// Used wherever reproducible pseudo-randomness is required (std::
/// distributions are not bit-stable across standard libraries).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

/// Element `index` (1-based) of the van der Corput sequence in `base`.
inline double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

/// First few primes, used as Halton bases per dimension.
inline std::uint64_t halton_base(std::size_t dim) {
  static constexpr std::uint64_t primes[] = {2,  3,  5,  7,  11, 13,
                                             17, 19, 23, 29, 31, 37};
  return primes[dim % (sizeof(primes) / sizeof(primes[0]))];
}

/// Pairwise (cascade) summation; deterministic and more accurate than a
/// running sum for long series.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double sqr(double x) { return x * x; }

}  // namespace obstructa

#endif
