#pragma once
// Deterministic random streams for Monte Carlo: mt19937_64 (whose output
// sequence is fixed by the C++ standard) plus Box-Muller normals, so runs
// are bit-reproducible from (seed, shard) across platforms and -O levels.

#include <cmath>
#include <cstdint>
#include <random>

namespace manin::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t shard_seed(std::uint64_t seed, int shard) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(shard + 1)));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  long double uniform() {
    return static_cast<long double>(eng_() >> 11) * 0x1.0p-53L;
  }

  // Uniform in (-1, 1).
  long double symmetric() { return 2.0L * uniform() - 1.0L; }

  std::uint64_t bits() { return eng_(); }

  // Standard normal via Box-Muller (pair cached).
  long double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    long double u1 = 0.0L;
    do {
      u1 = uniform();
    } while (u1 <= 0.0L);
    const long double u2 = uniform();
    const long double r = sqrtl(-2.0L * logl(u1));
    const long double a = 2.0L * kPi * u2;
    spare_ = r * sinl(a);
    has_spare_ = true;
    return r * cosl(a);
  }

  static constexpr long double kPi = 3.14159265358979323846264338327950288L;

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  long double spare_ = 0.0L;
};

}  // namespace manin::detail
