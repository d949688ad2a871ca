#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

// Deterministic random source used by the synthetic generator and the
// evaluation harness.  The core generator is SplitMix64; independent streams
// are derived from (seed, tag) so that, e.g., the noise draws do not shift
// when the number of support draws changes.  Normal deviates come from a
// hand-rolled Box-Muller transform (two fresh uniforms per call, no cached
// spare) so sequences are bit-identical across platforms and call patterns.

namespace mdlsel {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that nearby seeds do not produce nearly identical leads.
    (void)detail::splitmix64(state_);
  }

  // Independent stream keyed by a short label.
  static Rng stream(std::uint64_t seed, std::string_view tag) {
    return Rng(seed ^ (detail::fnv1a64(tag) | 1ULL));
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  // Uniform on (0, 1].
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Unbiased draw from [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from {0, ..., n-1}, in draw order.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      std::size_t j = static_cast<std::size_t>(below(static_cast<std::uint64_t>(n - i)));
      out.push_back(pool[j]);
      std::swap(pool[j], pool[static_cast<std::size_t>(n - 1 - i)]);
    }
    return out;
  }

private:
  std::uint64_t state_;
};

}  // namespace mdlsel
