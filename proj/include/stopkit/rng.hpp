#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace stopkit {

// SplitMix64: the one generator every randomized component uses. It is
// seedable, has a public algorithm, and produces identical streams on every
// platform, which keeps simulation results reproducible bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double nextDouble() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). The modulo bias is below n / 2^64, orders of magnitude
  // under every tolerance used here, and keeps the stream portable.
  std::uint64_t nextBelow(std::uint64_t n) { return next() % n; }

  int nextInt(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(nextBelow(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double nextInRange(double lo, double hi) { return lo + (hi - lo) * nextDouble(); }

  // Counter-based splitting: child streams for distinct indices never overlap
  // in practice and are independent of how much the parent has been consumed.
  static SplitMix64 stream(std::uint64_t rootSeed, std::uint64_t streamIndex) {
    SplitMix64 mix(rootSeed ^ (0x632be59bd9b4e019ULL * (streamIndex + 1)));
    return SplitMix64(mix.next());
  }

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates shuffle; uniform over permutations.
template <typename T>
void fisherYates(std::vector<T>& arr, SplitMix64& rng) {
  for (std::size_t i = arr.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.nextBelow(i));
    std::swap(arr[i - 1], arr[j]);
  }
}

// Pairwise summation: deterministic reduction order independent of thread
// count, and better rounding behavior than a running sum.
double pairwiseSum(const double* data, std::size_t count);
double pairwiseSum(const std::vector<double>& data);

}  // namespace stopkit
