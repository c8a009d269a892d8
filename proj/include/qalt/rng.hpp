#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace qalt {

/// Counter-based pseudo-random stream (SplitMix64 finalizer over key+counter).
///
/// Every draw is a pure function of (key, counter), so streams are trivially
/// reproducible and `split()` derives statistically independent child streams
/// from a parent without sharing state — the property the parallel Monte Carlo
/// paths rely on. Output is identical across runs for a fixed seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : key_(finalize(seed ^ 0x9e3779b97f4a7c15ull)) {}

  std::uint64_t next_u64() {
    return finalize(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Multiply-shift map; the bias is O(n / 2^64),
  /// far below anything observable at the dimensions used here.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Standard normal via Box-Muller (second value cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // 1 - uniform() lies in (0, 1], keeping the log argument positive.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Complex gaussian with independent N(0,1) real and imaginary parts.
  std::complex<double> gaussian_complex() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  /// Independent child stream for lane `lane`. Children of distinct lanes,
  /// and the parent itself, never share (key, counter) pairs.
  RngStream split(std::uint64_t lane) const {
    return RngStream(FromKey{},
                     finalize(key_ ^ finalize(lane * 0xd1342543de82ef95ull +
                                              0x632be59bd9b4e019ull)));
  }

 private:
  struct FromKey {};
  RngStream(FromKey, std::uint64_t key) : key_(key) {}

  static std::uint64_t finalize(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qalt
