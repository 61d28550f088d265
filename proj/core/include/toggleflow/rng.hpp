#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace toggleflow {

// Deterministic randomness for every solver. The engine is a seeded
// mt19937_64 and all mappings from raw bits to samples live here, so a seed
// pins the entire numeric stream regardless of platform or libstdc++ version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform double in [0, 1): top 53 bits of one engine step.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n). Consumes one engine step.
  std::uint64_t below(std::uint64_t n) {
    assert(n > 0);
    auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return i >= n ? n - 1 : i;
  }

  // Inverse-CDF sample over a nondecreasing cumulative weight array.
  // Consumes exactly one engine step; scaling all weights by a common
  // power of two leaves every decision unchanged.
  int pick(const std::vector<double>& cum) {
    assert(!cum.empty() && cum.back() > 0.0);
    const double u = uniform() * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    auto idx = static_cast<int>(it - cum.begin());
    if (idx >= static_cast<int>(cum.size())) idx = static_cast<int>(cum.size()) - 1;
    return idx;
  }

  // For std:: distributions (used only where the sample count makes
  // per-draw inverse CDF impractical).
  std::mt19937_64& engine() { return eng_; }

  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Child-stream seed for reproducible nested runs: hash(parent, index).
  static std::uint64_t derive(std::uint64_t parent, std::uint64_t index) {
    return mix(parent ^ mix(index));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace toggleflow
