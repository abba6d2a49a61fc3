#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace renorm {

// Every sampled check takes an explicit seed and owns its engine, so a fixed
// (input, seed) pair reproduces every output bit. No global RNG state.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Derives a child seed so independent sampling stages don't share streams.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  // SplitMix64 step on seed ^ golden-ratio multiples of the stream index.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform(Rng& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::vector<double> gaussian_vector(Rng& g, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(g);
  return v;
}

// Uniform point on the unit sphere in R^dim.
inline std::vector<double> unit_vector(Rng& g, int dim) {
  for (;;) {
    auto v = gaussian_vector(g, dim);
    double s = 0;
    for (double x : v) s += x * x;
    if (s > 1e-24) {
      double inv = 1.0 / std::sqrt(s);
      for (auto& x : v) x *= inv;
      return v;
    }
  }
}

}  // namespace renorm
