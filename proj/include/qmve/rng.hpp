#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qmve/common.hpp"

namespace qmve {

// splitmix64; used to derive independent substreams from a master seed so
// that parallel trials draw identical values regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x51ed2700a1b3c2d4ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : base_(seed), eng_(splitmix64(seed ^ 0xabcdef0123456789ULL)) {}

  double uniform() {
    // 53-bit mantissa draw in [0, 1)
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double normal() { return normal_(eng_); }

  std::uint64_t bits() { return eng_(); }

  // index in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Substream derivation uses the seed this Rng was built from, not its
  // current engine state, so trial ordering cannot leak between streams.
  Rng substream(std::uint64_t stream) const {
    return Rng(derive_seed(base_, stream));
  }

  std::uint64_t base() const { return base_; }

 private:
  std::uint64_t base_;
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Inverse-CDF draw from an explicit probability table; binary search over the
// cumulative sums.  Table need not be perfectly normalized (last bucket
// absorbs rounding slack).
class TableSampler {
 public:
  explicit TableSampler(const std::vector<double>& probs) {
    cum_.resize(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cum_[i] = acc;
    }
    total_ = acc;
  }

  std::size_t draw(Rng& rng) const {
    double u = rng.uniform() * total_;
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] > u) hi = mid; else lo = mid + 1;
    }
    return lo;
  }

  double total() const { return total_; }

 private:
  std::vector<double> cum_;
  double total_ = 0.0;
};

}  // namespace qmve
