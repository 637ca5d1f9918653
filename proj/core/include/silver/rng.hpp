#pragma once

// Counter-based pseudo-random numbers.
//
// Draw i of stream (seed, stream) is splitmix64_mix(key + (i + 1) * GOLDEN),
// with key = splitmix64_mix(seed) ^ splitmix64_mix(stream ^ STREAM_SALT) and
// the published SplitMix64 constants (Steele, Lea & Flood 2014):
//   GOLDEN = 0x9e3779b97f4a7c15, multipliers 0xbf58476d1ce4e5b9 and
//   0x94d049bb133111eb, shifts 30 / 27 / 31.
// Output depends only on (seed, stream, counter), so every experiment is
// reproducible from a single integer on any platform with IEEE doubles.

#include "silver/linalg.hpp"

#include <cstdint>

namespace silver {

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (both variates of a pair are used).
  double normal() noexcept;
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Vector normal_vector(CounterRng& rng, Eigen::Index n, double scale = 1.0);
Matrix normal_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0);
/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// diagonal of R made positive.
Matrix haar_orthogonal(CounterRng& rng, Eigen::Index n);
/// Uniform point on the unit sphere S^{n-1}.
Vector uniform_sphere(CounterRng& rng, Eigen::Index n);

}  // namespace silver
