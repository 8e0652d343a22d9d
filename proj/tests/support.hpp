#pragma once

// Test-only generators and oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "fairot/distributions.hpp"
#include "fairot/transport.hpp"

namespace fairot::testing {

// Random atomic distribution: up to `max_atoms` values on a coarse grid
// (ties across distributions are common) with random positive weights.
inline EmpiricalDistribution random_distribution(std::mt19937_64& gen, std::size_t max_atoms) {
  std::uniform_int_distribution<std::size_t> count(1, max_atoms);
  std::uniform_int_distribution<int> lattice(-20, 20);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  const std::size_t n = count(gen);
  std::vector<double> values(n), weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = 0.25 * lattice(gen);
    weights[i] = weight(gen);
  }
  return from_samples(values, weights);
}

inline std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t k) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += (x = u(gen));
  for (auto& x : w) x /= total;
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) head += w[i];
  w.back() = 1.0 - head;
  return w;
}

inline FairnessProfile random_profile(std::mt19937_64& gen, std::size_t max_groups, std::size_t max_atoms) {
  std::uniform_int_distribution<std::size_t> groups(1, max_groups);
  const std::size_t k = groups(gen);
  const auto w = random_simplex(gen, k);
  std::vector<GroupDistribution> entries;
  for (std::size_t s = 0; s < k; ++s)
    entries.push_back({static_cast<int>(s) + 1, w[s], random_distribution(gen, max_atoms)});
  return FairnessProfile(std::move(entries));
}

// W2^2 between two uniform measures on n points each, by enumerating all
// permutations (the extreme points of the transport polytope).
inline double w2_squared_by_permutations(std::vector<double> a, std::vector<double> b) {
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cost += (a[i] - b[perm[i]]) * (a[i] - b[perm[i]]);
    best = std::min(best, cost / static_cast<double>(a.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Kolmogorov-Smirnov distance of a sample from Unif(0, 1).
inline double ks_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    d = std::max(d, static_cast<double>(i + 1) / n - sample[i]);
    d = std::max(d, sample[i] - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace fairot::testing
