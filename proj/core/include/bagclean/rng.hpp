#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bagclean {

// Seeded random stream with fixed bit-level algorithms so that runs are
// reproducible across platforms and standard library versions. The standard
// distribution classes are implementation-defined, so uniform and gaussian
// draws are derived from raw mt19937_64 output directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform draw in [0, 1), 53 bits of precision.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes exactly two uniform draws.
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t next_u64() { return gen_(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) %
           n;
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; used to derive independent per-stream sub-seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace bagclean
