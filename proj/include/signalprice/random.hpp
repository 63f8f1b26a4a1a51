#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace signalprice {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic sub-stream seed; lets per-buyer / per-posterior work run
// independently (and in parallel) without sharing generator state.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0,1). Bit-level construction instead of
  // std::uniform_real_distribution, whose output is implementation-defined.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Index into a pmf given by non-negative weights summing to ~1.
  // Draws in (0,1] so zero-probability leading atoms are never picked.
  std::size_t pick(const std::vector<double>& pmf) {
    double u = 1.0 - uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
      acc += pmf[i];
      if (u <= acc) return i;
    }
    return pmf.empty() ? 0 : pmf.size() - 1;
  }

  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace signalprice
