#pragma once

#include <cstdint>
#include <vector>

#include "subspect/common.hpp"

namespace subspect {

// Deterministic xoshiro256++ generator. Self-contained so that streams are
// bit-reproducible across compilers and standard libraries; std::*_distribution
// is implementation-defined and therefore avoided.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform integer in [0, n), unbiased (rejection sampling). n >= 1.
  uint64_t uniform_int(uint64_t n);

  // Standard normal via Box-Muller.
  double normal();

  // Circularly-symmetric complex normal with E|z|^2 = 1.
  cplx cnormal();

  // Independent child stream; distinct `stream` values give decorrelated
  // generators for parallel/per-example use.
  Rng derive(uint64_t stream) const;

  // First k values of a Fisher-Yates shuffle of 0..n-1 (k <= n).
  std::vector<int> sample_without_replacement(int n, int k);
  void shuffle(std::vector<int>& v);

 private:
  uint64_t state_[4];
};

}  // namespace subspect
