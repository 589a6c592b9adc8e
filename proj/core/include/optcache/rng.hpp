#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace optcache {

// Deterministic PRNG with explicit distribution code so that runs are
// bit-reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // modulo bias is negligible for n << 2^64 but avoid it anyway
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Box-Muller, one value per call (the spare is discarded to keep the
  // stream position independent of call parity).
  double normal(double mean, double stddev) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586 * u2);
  }

  // Derive an independent sub-stream (for per-component seeding).
  std::uint64_t fork() { return next_u64(); }

 private:
  std::uint64_t state_;
};

// Sampler over a fixed discrete distribution via inverse CDF binary search.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(const std::vector<double>& probs) { reset(probs); }

  void reset(const std::vector<double>& probs) {
    cdf_.resize(probs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      acc += probs[k];
      cdf_[k] = acc;
    }
    if (!cdf_.empty()) cdf_.back() = 1.0;
  }

  int draw(Rng& rng) const {
    double u = rng.uniform();
    int lo = 0, hi = static_cast<int>(cdf_.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (cdf_[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  bool empty() const { return cdf_.empty(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace optcache
