#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace kgprobe::selection {

/// Platform-independent sampling helpers over mt19937_64 (whose output is
/// fixed by the standard, unlike std::uniform_int_distribution or std::shuffle).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
      std::uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  /// Moves a uniform k-subset to the front (partial Fisher-Yates) and drops the rest.
  template <class T>
  void sample_in_place(std::vector<T>& v, std::size_t k) {
    for (std::size_t i = 0; i < k && i < v.size(); ++i) std::swap(v[i], v[i + below(v.size() - i)]);
    if (k < v.size()) v.resize(k);
  }

 private:
  std::mt19937_64 engine_;
};

/// Independent stream seed for a purpose tag.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace kgprobe::selection
