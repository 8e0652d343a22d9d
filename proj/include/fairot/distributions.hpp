#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fairot/error.hpp"
#include "fairot/random.hpp"

namespace fairot {

inline constexpr double kWeightTolerance = 1e-12;
inline constexpr double kLevelResolution = 1e-15;

struct Atom {
  double value;
  double weight;
};

// A probability measure with finitely many atoms on the real line.
//
// Stored as strictly increasing atom values together with the running
// cumulative weight at each atom. The last cumulative level is exactly 1 and
// atom weights are differences of consecutive levels, so every quantile
// breakpoint is a stored level and no rounding drift accumulates.
//
// The CDF is right-continuous; the quantile is the left-continuous
// generalized inverse inf{x : F(x) >= t}.
class EmpiricalDistribution {
 public:
  // Sorts, merges duplicate values and normalizes. Omitted weights mean
  // uniform 1/n. Zero-weight samples are dropped.
  static EmpiricalDistribution from_samples(std::span<const double> values,
                                            std::span<const double> weights = {}) {
    if (values.empty()) throw InputError("empty sample");
    if (!weights.empty() && weights.size() != values.size())
      throw InputError("weights and values differ in length");
    for (double v : values)
      if (!std::isfinite(v)) throw InputError("non-finite sample value");
    for (double w : weights) {
      if (!std::isfinite(w)) throw InputError("non-finite weight");
      if (w < 0.0) throw InputError("negative weight");
    }

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> merged_values;
    std::vector<double> prefix;
    double running = 0.0;
    for (std::size_t i : order) {
      const double w = weights.empty() ? 1.0 : weights[i];
      if (w == 0.0) continue;
      running += w;
      if (!merged_values.empty() && merged_values.back() == values[i]) {
        prefix.back() = running;
      } else {
        merged_values.push_back(values[i]);
        prefix.push_back(running);
      }
    }
    if (merged_values.empty() || !(running > 0.0)) throw NumericalError("degenerate weights");

    EmpiricalDistribution d;
    d.values_.reserve(merged_values.size());
    d.cumulative_.reserve(merged_values.size());
    for (std::size_t i = 0; i < merged_values.size(); ++i) {
      const double level = (i + 1 == merged_values.size()) ? 1.0 : prefix[i] / running;
      // a weight below double resolution collapses onto the previous level
      if (!d.cumulative_.empty() && level <= d.cumulative_.back()) continue;
      d.values_.push_back(merged_values[i]);
      d.cumulative_.push_back(level);
    }
    return d;
  }

  // Builds directly from strictly increasing values and strictly increasing
  // cumulative levels ending within 1e-12 of 1.
  static EmpiricalDistribution from_cumulative(std::vector<double> values,
                                               std::vector<double> cumulative) {
    if (values.empty()) throw InputError("empty sample");
    if (values.size() != cumulative.size())
      throw InputError("values and cumulative levels differ in length");
    double previous_level = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) throw InputError("non-finite atom value");
      if (i > 0 && !(values[i] > values[i - 1]))
        throw InputError("atom values must be strictly increasing");
      if (!(cumulative[i] > previous_level))
        throw NumericalError("cumulative levels must be strictly increasing");
      previous_level = cumulative[i];
    }
    if (std::abs(cumulative.back() - 1.0) > kWeightTolerance)
      throw NumericalError("cumulative levels must end at 1");
    cumulative.back() = 1.0;
    EmpiricalDistribution d;
    d.values_ = std::move(values);
    d.cumulative_ = std::move(cumulative);
    return d;
  }

  static EmpiricalDistribution point_mass(double value) {
    return from_cumulative({value}, {1.0});
  }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> cumulative() const { return cumulative_; }

  double value(std::size_t i) const { return values_[i]; }
  // F(x-) at atom i.
  double level_below(std::size_t i) const { return i == 0 ? 0.0 : cumulative_[i - 1]; }
  double weight(std::size_t i) const { return cumulative_[i] - level_below(i); }

  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back({values_[i], weight(i)});
    return out;
  }

  std::vector<double> weights() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = weight(i);
    return out;
  }

  double cdf(double x) const {
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    if (it == values_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - values_.begin()) - 1];
  }

  // Index of the atom that quantile(t) returns.
  std::size_t quantile_index(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("quantile level out of range");
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), t);
    if (it == cumulative_.end()) return size() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

  double quantile(double t) const { return values_[quantile_index(t)]; }

  std::optional<std::size_t> find_atom(double x) const {
    const auto it = std::lower_bound(values_.begin(), values_.end(), x);
    if (it == values_.end() || *it != x) return std::nullopt;
    return static_cast<std::size_t>(it - values_.begin());
  }

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m += weight(i) * values_[i];
    return m;
  }

  friend bool operator==(const EmpiricalDistribution&, const EmpiricalDistribution&) = default;

 private:
  EmpiricalDistribution() = default;

  std::vector<double> values_;
  std::vector<double> cumulative_;
};

inline EmpiricalDistribution from_samples(std::span<const double> values,
                                          std::span<const double> weights = {}) {
  return EmpiricalDistribution::from_samples(values, weights);
}

inline double cdf(const EmpiricalDistribution& d, double x) { return d.cdf(x); }

inline double quantile(const EmpiricalDistribution& d, double t) { return d.quantile(t); }

// Draws a level uniformly from the quantile interval (F(x-), F(x)] of the
// atom at x. Pushing an atom-distributed x through this yields Unif(0, 1].
inline double randomized_rank(const EmpiricalDistribution& d, double x, Rng& rng) {
  const auto atom = d.find_atom(x);
  if (!atom) throw InputError("value not in support");
  const double lo = d.level_below(*atom);
  const double hi = d.cumulative()[*atom];
  const double t = hi - uniform01(rng) * (hi - lo);
  return t > lo ? t : hi;
}

// Sorted union of the cumulative levels of all inputs, starting at 0 and
// ending at 1. Every input quantile function is constant on each open
// interval between consecutive breakpoints.
inline std::vector<double> merge_quantile_grid(std::span<const EmpiricalDistribution> dists) {
  if (dists.empty()) throw InputError("merge_quantile_grid needs at least one distribution");
  std::vector<double> levels{0.0};
  for (const auto& d : dists) levels.insert(levels.end(), d.cumulative().begin(), d.cumulative().end());
  std::sort(levels.begin(), levels.end());

  std::vector<double> grid{0.0};
  for (double level : levels)
    if (level - grid.back() > kLevelResolution) grid.push_back(level);
  // the largest level is exactly 1; keep it even if it sits within
  // resolution of the previous breakpoint
  if (grid.back() != 1.0) {
    if (grid.size() > 1) grid.back() = 1.0;
    else grid.push_back(1.0);
  }
  return grid;
}

inline std::vector<double> merge_quantile_grid(std::initializer_list<EmpiricalDistribution> dists) {
  return merge_quantile_grid(std::span<const EmpiricalDistribution>(dists.begin(), dists.size()));
}

}  // namespace fairot
