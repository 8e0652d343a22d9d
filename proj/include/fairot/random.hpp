#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fairot {

// mt19937_64 is bit-specified by the standard. The std distributions are not,
// so the transforms below are spelled out to keep outputs identical across
// standard libraries.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Marsaglia polar method; discards the second variate so each call consumes
// a self-contained chunk of the stream.
inline double standard_normal(Rng& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double r2 = u * u + v * v;
    if (r2 > 0.0 && r2 < 1.0) return u * std::sqrt(-2.0 * std::log(r2) / r2);
  }
}

// Independent stream for one row of a dataset: predictions do not depend on
// the order in which rows are processed.
inline Rng row_stream(std::uint64_t seed, std::uint64_t row) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(row + 0x632be59bd9b4e019ULL)));
}

}  // namespace fairot
