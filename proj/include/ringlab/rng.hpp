#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace ringlab {

namespace detail {

// SplitMix64 finalizer: full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

}  // namespace detail

// Identifies one deterministic sample stream. Equal SeedSpec values produce
// bit-identical streams on every run and under every thread schedule; trials
// running concurrently must use distinct trial_index values.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  // Avalanche hash of (master_seed, trial_index). Streams are derived by
  // hashing, never by jumping, so they are order-independent.
  std::uint64_t stream() const {
    return detail::mix64(detail::mix64(master_seed + detail::kGolden) +
                         (trial_index + 1) * detail::kGolden);
  }

  // Hierarchical sub-stream: the k-th stream rooted at this one.
  SeedSpec child(std::uint64_t k) const { return SeedSpec{stream(), k}; }

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// Deterministic random stream: mt19937_64 plus fully specified uniform and
// Gaussian generation (distributions from <random> are not pinned across
// standard library implementations).
class RandomStream {
 public:
  explicit RandomStream(SeedSpec spec) : engine_(spec.stream()) {}
  explicit RandomStream(std::uint64_t raw_seed) : engine_(raw_seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes uniforms in pairs.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Complex standard Gaussian: independent re/im, each variance 1/2.
  std::complex<double> gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  static constexpr double kInvSqrt2 = 0.70710678118654752440;

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ringlab
