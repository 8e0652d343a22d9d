#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairot/distributions.hpp"
#include "fairot/error.hpp"
#include "fairot/transport.hpp"

namespace fairot {

struct PredictionRow {
  double prediction;
  std::optional<double> y;
  int s;
};

class GroupedPredictions {
 public:
  explicit GroupedPredictions(std::vector<PredictionRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw InputError("no predictions");
    for (const auto& r : rows_) {
      if (r.s < 1) throw InputError("group labels are 1-based");
      by_group_[r.s].push_back(r.prediction);
    }
  }

  GroupedPredictions(std::span<const double> predictions, std::span<const int> groups,
                     std::span<const double> y = {})
      : GroupedPredictions(zip(predictions, groups, y)) {}

  std::size_t size() const { return rows_.size(); }
  std::span<const PredictionRow> rows() const { return rows_; }
  const std::map<int, std::vector<double>>& by_group() const { return by_group_; }
  bool has_group(int s) const { return by_group_.count(s) > 0; }

 private:
  static std::vector<PredictionRow> zip(std::span<const double> predictions, std::span<const int> groups,
                                        std::span<const double> y) {
    if (predictions.size() != groups.size() || (!y.empty() && y.size() != predictions.size()))
      throw InputError("prediction columns differ in length");
    std::vector<PredictionRow> rows;
    rows.reserve(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i)
      rows.push_back({predictions[i], y.empty() ? std::nullopt : std::optional<double>(y[i]), groups[i]});
    return rows;
  }

  std::vector<PredictionRow> rows_;
  std::map<int, std::vector<double>> by_group_;
};

inline double quadratic_risk(const GroupedPredictions& p) {
  double total = 0.0;
  for (const auto& r : p.rows()) {
    if (!r.y) throw InputError("quadratic risk needs a response on every row");
    const double d = *r.y - r.prediction;
    total += d * d;
  }
  return total / static_cast<double>(p.size());
}

// Excess risk of the best DP-fair regressor over the one with this profile:
// sum_s pi_s W2^2(mu_s, barycenter).
inline double cost_of_fairness(const FairnessProfile& profile) {
  return weighted_w2_cost(profile, barycenter(profile));
}

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
inline double ks_statistic(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  double sup = 0.0;
  for (double x : a.values()) sup = std::max(sup, std::abs(a.cdf(x) - b.cdf(x)));
  for (double x : b.values()) sup = std::max(sup, std::abs(a.cdf(x) - b.cdf(x)));
  return sup;
}

inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  return ks_statistic(from_samples(a), from_samples(b));
}

// P(pred > threshold | S = a) / P(pred > threshold | S = b).
inline double disparate_impact(const GroupedPredictions& p, double threshold, int group_a, int group_b) {
  auto rate = [&](int s) {
    const auto it = p.by_group().find(s);
    if (it == p.by_group().end()) throw InputError("group " + std::to_string(s) + " has no predictions");
    const auto above = std::count_if(it->second.begin(), it->second.end(),
                                     [&](double v) { return v > threshold; });
    return static_cast<double>(above) / static_cast<double>(it->second.size());
  };
  const double ra = rate(group_a);
  const double rb = rate(group_b);
  if (rb == 0.0) throw NumericalError("undefined disparate impact");
  return ra / rb;
}

// Largest pairwise KS statistic between group-conditional prediction laws.
// Zero for a single group.
inline double dp_gap(const GroupedPredictions& p) {
  std::vector<EmpiricalDistribution> laws;
  for (const auto& [s, preds] : p.by_group()) laws.push_back(from_samples(preds));
  double gap = 0.0;
  for (std::size_t i = 0; i < laws.size(); ++i)
    for (std::size_t j = i + 1; j < laws.size(); ++j) gap = std::max(gap, ks_statistic(laws[i], laws[j]));
  return gap;
}

// Var(E[g | S]) with empirical group frequencies.
inline double conditional_mean_variance(const GroupedPredictions& p) {
  const double n = static_cast<double>(p.size());
  std::vector<double> freq;
  std::vector<double> means;
  for (const auto& [s, preds] : p.by_group()) {
    double sum = 0.0;
    for (double v : preds) sum += v;
    freq.push_back(static_cast<double>(preds.size()) / n);
    means.push_back(sum / static_cast<double>(preds.size()));
  }
  double overall = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) overall += freq[i] * means[i];
  double var = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) var += freq[i] * (means[i] - overall) * (means[i] - overall);
  return var;
}

}  // namespace fairot
