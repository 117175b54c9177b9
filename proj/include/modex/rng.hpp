#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace modex {

// Deterministic random source. std::mt19937_64 output is fully specified by
// the standard; the bounded/real mappings below are implemented by hand so
// that results do not depend on the standard library's distribution
// implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n), n > 0.
  uint64_t next_below(uint64_t n) {
    assert(n > 0);
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Uniform integer in [lo, hi], inclusive.
  int next_int(int lo, int hi) {
    assert(lo <= hi);
    return lo + static_cast<int>(next_below(
                    static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1));
  }

  // Uniform real in [0, 1).
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Bernoulli with probability p.
  bool next_bool(double p) { return next_real() < p; }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace modex
