#pragma once

// Counter-based deterministic RNG. Each stream is identified by a 64-bit key
// derived from (seed, stream name); draws are a pure function of
// (key, counter), so parallel evaluation of independent streams reproduces
// the serial results and a shorter run is always a prefix of a longer one.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace otd {

namespace detail {
// splitmix64-style finalizer; statistically solid for simulation use.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(detail::mix64(seed ^ 0x6f7264696e617279ULL)) {}

  // Independent substream keyed by name; the parent stream is unaffected.
  Rng stream(std::string_view name) const {
    Rng r(0);
    r.key_ = detail::mix64(detail::fnv1a(key_, name));
    r.counter_ = 0;
    return r;
  }

  std::uint64_t next_u64() { return detail::mix64(key_ ^ detail::mix64(counter_++ + 0x1357fd9b)); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform01_open() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    return next_u64() % n;
  }

  // Box-Muller with two fresh uniforms per call (no cached spare), so the
  // draw count per sample is fixed and prefix runs stay reproducible.
  double normal() {
    double u = uniform01_open();
    double v = uniform01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  // Symmetric Dirichlet(1) via normalized exponentials.
  std::vector<double> dirichlet1(std::size_t n) {
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& x : w) {
      x = -std::log(uniform01_open());
      s += x;
    }
    for (auto& x : w) x /= s;
    return w;
  }

  // Random permutation of {0, ..., n-1} (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[uniform_int(i)]);
    return p;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace otd
