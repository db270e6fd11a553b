#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace trirank {

using Seed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a over bytes, used to fingerprint configuration strings.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic RNG. The engine is mt19937_64, whose output sequence is fixed
// by the standard, and all draw helpers are implemented here rather than with
// std::uniform_*_distribution so streams are identical across toolchains.
class Rng {
 public:
  explicit Rng(Seed seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0,1) with 53-bit resolution.
  double next_double() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0,n), n > 0. Fixed-point multiply, no rejection loop.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  bool bernoulli(double p) { return next_double() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[below(i)]);
  }

  // Stable derivation of per-stream seeds from a master seed. Streams with
  // distinct indices are decorrelated regardless of evaluation order.
  static Seed derive(Seed master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream ^ 0x5851f42d4c957f2dULL));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace trirank
