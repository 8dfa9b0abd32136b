#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nestlie/bimodule.hpp"
#include "nestlie/nest.hpp"

namespace nestlie {

// Counter-free splittable generator (SplitMix64 update function): fully
// determined by the seed, no platform or library dependence, so fixtures are
// reproducible bit-for-bit everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound >= 1. Fixed-point multiply keeps the
  // draw sequence independent of the bound's bit width.
  std::uint64_t below(std::uint64_t bound) {
    return std::uint64_t((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Standard normal via Box-Muller on consecutive uniforms.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct InstanceSpec {
  Nest nest;
  std::vector<Matrix> seed_matrices;
  std::string label;
  std::optional<std::uint64_t> rng_seed;
};

// The 5x5 worked instance: full chain {0,1,2,3,4,5}, seeds = identity plus
// the 17 matrix units E_ij (1-based) with j >= 3, or j = 2 and i <= 2.
InstanceSpec paper_example();

// Deterministic random instance: nest boundaries are a uniform sorted choice
// of m-1 interior cuts from {1..n-1} (partial Fisher-Yates on the seed
// stream), then g generator matrices with independent standard complex
// normal entries filled column-major, real part before imaginary part.
InstanceSpec random_instance(int n, int m, int g, std::uint64_t rng_seed);

// All order-preserving self-maps of the nest with phi(0) = 0, enumerated in
// lexicographic table order. There are C(2m, m) of them; requires m <= 6.
std::vector<NestMap> monotone_map_enumerator(const Nest& nest);

}  // namespace nestlie
