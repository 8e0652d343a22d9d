#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fairot/distributions.hpp"
#include "fairot/error.hpp"

namespace fairot {

struct GroupDistribution {
  int group_id;
  double weight;
  EmpiricalDistribution distribution;
};

// Group-conditional distributions of a score together with the group
// weights. Groups keep the order they were given in.
class FairnessProfile {
 public:
  explicit FairnessProfile(std::vector<GroupDistribution> groups) : groups_(std::move(groups)) {
    if (groups_.empty()) throw InputError("fairness profile needs at least one group");
    std::set<int> ids;
    double total = 0.0;
    for (const auto& g : groups_) {
      if (!ids.insert(g.group_id).second)
        throw InputError("duplicate group id " + std::to_string(g.group_id));
      if (!(g.weight > 0.0) || !std::isfinite(g.weight))
        throw NumericalError("group weights must be positive");
      total += g.weight;
    }
    if (std::abs(total - 1.0) > kWeightTolerance)
      throw NumericalError("group weights must sum to 1");
  }

  std::size_t size() const { return groups_.size(); }
  const GroupDistribution& operator[](std::size_t i) const { return groups_[i]; }
  auto begin() const { return groups_.begin(); }
  auto end() const { return groups_.end(); }

  std::optional<std::size_t> index_of(int group_id) const {
    for (std::size_t i = 0; i < groups_.size(); ++i)
      if (groups_[i].group_id == group_id) return i;
    return std::nullopt;
  }

  std::size_t require_index(int group_id) const {
    const auto i = index_of(group_id);
    if (!i) throw InputError("unknown group " + std::to_string(group_id));
    return *i;
  }

  std::vector<EmpiricalDistribution> distributions() const {
    std::vector<EmpiricalDistribution> out;
    out.reserve(size());
    for (const auto& g : groups_) out.push_back(g.distribution);
    return out;
  }

  std::vector<double> weights() const {
    std::vector<double> out;
    out.reserve(size());
    for (const auto& g : groups_) out.push_back(g.weight);
    return out;
  }

 private:
  std::vector<GroupDistribution> groups_;
};

struct CouplingSegment {
  double level_lo;
  double level_hi;
  std::vector<double> values;  // one quantile value per group
  double barycenter_value;

  double length() const { return level_hi - level_lo; }
};

// The comonotone law of (F_1^{-1}(U), ..., F_k^{-1}(U)), U ~ Unif(0, 1],
// as a piecewise-constant function of the level U. Segments partition (0, 1].
class MultimarginalCoupling {
 public:
  MultimarginalCoupling(std::vector<CouplingSegment> segments, std::vector<double> weights)
      : segments_(std::move(segments)), weights_(std::move(weights)) {
    if (segments_.empty()) throw InputError("coupling needs at least one segment");
    double previous = 0.0;
    for (const auto& seg : segments_) {
      if (seg.level_lo != previous || !(seg.level_hi > seg.level_lo))
        throw NumericalError("coupling segments must partition (0, 1]");
      if (seg.values.size() != weights_.size())
        throw InputError("coupling segment arity differs from group count");
      previous = seg.level_hi;
    }
    if (previous != 1.0) throw NumericalError("coupling segments must end at level 1");
  }

  std::size_t size() const { return segments_.size(); }
  std::size_t group_count() const { return weights_.size(); }
  std::span<const CouplingSegment> segments() const { return segments_; }
  const CouplingSegment& operator[](std::size_t i) const { return segments_[i]; }
  std::span<const double> weights() const { return weights_; }

  // Segment containing level t, i.e. level_lo < t <= level_hi.
  std::size_t segment_index(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("quantile level out of range");
    const auto it = std::lower_bound(segments_.begin(), segments_.end(), t,
                                     [](const CouplingSegment& s, double level) { return s.level_hi < level; });
    if (it == segments_.end()) return segments_.size() - 1;
    return static_cast<std::size_t>(it - segments_.begin());
  }

 private:
  std::vector<CouplingSegment> segments_;
  std::vector<double> weights_;
};

// Squared 2-Wasserstein distance: the integral over (0, 1] of the squared
// difference of the quantile functions, summed exactly on the merged grid.
inline double w2_squared(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  const auto grid = merge_quantile_grid({p, q});
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i - 1] + grid[i]);
    const double diff = p.quantile(mid) - q.quantile(mid);
    total += (grid[i] - grid[i - 1]) * diff * diff;
  }
  return total;
}

// Barycenter map b(z) = sum_s pi_s z_s.
inline double barycenter_map(std::span<const double> weights, std::span<const double> z) {
  double b = 0.0;
  for (std::size_t s = 0; s < weights.size(); ++s) b += weights[s] * z[s];
  return b;
}

inline MultimarginalCoupling comonotone_coupling(const FairnessProfile& profile) {
  const auto dists = profile.distributions();
  const auto weights = profile.weights();
  const auto grid = merge_quantile_grid(dists);

  std::vector<CouplingSegment> segments;
  segments.reserve(grid.size() - 1);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double mid = 0.5 * (grid[i - 1] + grid[i]);
    CouplingSegment seg{grid[i - 1], grid[i], std::vector<double>(dists.size()), 0.0};
    for (std::size_t s = 0; s < dists.size(); ++s) seg.values[s] = dists[s].quantile(mid);
    seg.barycenter_value = barycenter_map(weights, seg.values);
    segments.push_back(std::move(seg));
  }
  return MultimarginalCoupling(std::move(segments), weights);
}

namespace detail {

// Law of a per-segment value. Values that are nondecreasing along the
// segments keep the segment end levels as their cumulative levels exactly.
template <typename ValueOf>
EmpiricalDistribution segment_pushforward(const MultimarginalCoupling& coupling, ValueOf value_of) {
  std::vector<double> values;
  std::vector<double> cumulative;
  bool sorted = true;
  for (const auto& seg : coupling.segments()) {
    const double v = value_of(seg);
    if (!values.empty() && v == values.back()) {
      cumulative.back() = seg.level_hi;
      continue;
    }
    if (!values.empty() && v < values.back()) sorted = false;
    values.push_back(v);
    cumulative.push_back(seg.level_hi);
  }
  if (sorted) return EmpiricalDistribution::from_cumulative(std::move(values), std::move(cumulative));

  std::vector<double> lengths(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    lengths[i] = cumulative[i] - (i == 0 ? 0.0 : cumulative[i - 1]);
  return EmpiricalDistribution::from_samples(values, lengths);
}

}  // namespace detail

// Pushforward of the coupling through the barycenter map.
inline EmpiricalDistribution barycenter(const MultimarginalCoupling& coupling) {
  return detail::segment_pushforward(coupling, [](const CouplingSegment& s) { return s.barycenter_value; });
}

inline EmpiricalDistribution barycenter(const FairnessProfile& profile) {
  return barycenter(comonotone_coupling(profile));
}

// sum over segments of length * sum_s pi_s (z_s - b(z))^2
inline double multimarginal_cost(const MultimarginalCoupling& coupling) {
  const auto weights = coupling.weights();
  double total = 0.0;
  for (const auto& seg : coupling.segments()) {
    double inner = 0.0;
    for (std::size_t s = 0; s < weights.size(); ++s) {
      const double d = seg.values[s] - seg.barycenter_value;
      inner += weights[s] * d * d;
    }
    total += seg.length() * inner;
  }
  return total;
}

// sum_s pi_s W2^2(mu_s, target)
inline double weighted_w2_cost(const FairnessProfile& profile, const EmpiricalDistribution& target) {
  double total = 0.0;
  for (const auto& g : profile) total += g.weight * w2_squared(g.distribution, target);
  return total;
}

// Reassembles the law of coordinate s of the coupling.
inline EmpiricalDistribution coupling_marginal(const MultimarginalCoupling& coupling, std::size_t s) {
  return detail::segment_pushforward(coupling, [s](const CouplingSegment& seg) { return seg.values[s]; });
}

}  // namespace fairot
