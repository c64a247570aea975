#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hypersign {

// splitmix64 finalizer; decorrelates derived seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Named sub-streams. All randomness in a run flows from one master seed;
// each consumer draws from its own derived stream so that, e.g., changing
// the number of training epochs cannot perturb the data split.
enum class RngStream : std::uint64_t {
  split = 1,
  init = 2,
  augment = 3,
  sample = 4,
  analysis = 5,
};

inline std::uint64_t derive_seed(std::uint64_t master, RngStream stream,
                                 std::uint64_t index = 0) {
  return mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(stream))) + index);
}

// mt19937_64 wrapper with hand-rolled draw helpers. std::*_distribution is
// not pinned across standard libraries; these are, which keeps seeded runs
// reproducible independent of the toolchain.
class RandomEngine {
 public:
  explicit RandomEngine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, n). Lemire multiply-shift; bias is O(n / 2^64).
  std::size_t index(std::size_t n) {
    using u128 = unsigned __int128;
    return static_cast<std::size_t>((static_cast<u128>(gen_()) * n) >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * real01(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace hypersign
