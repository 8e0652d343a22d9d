#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairot/error.hpp"

namespace fairot {

struct LabeledRow {
  double y;
  std::vector<double> x;
  int s;
};

struct UnlabeledRow {
  std::vector<double> x;
  int s;
};

namespace detail {

template <typename Row>
std::size_t check_rows(const std::vector<Row>& rows, std::size_t dimension, const char* what) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].x.size() != dimension)
      throw InputError(std::string(what) + " row " + std::to_string(i) + ": feature dimension " +
                       std::to_string(rows[i].x.size()) + ", expected " + std::to_string(dimension));
    if (rows[i].s < 1)
      throw InputError(std::string(what) + " row " + std::to_string(i) + ": group label must be >= 1");
  }
  return dimension;
}

}  // namespace detail

// (y, x, s) rows sharing one feature dimension; s is a 1-based group label.
class LabeledDataset {
 public:
  explicit LabeledDataset(std::vector<LabeledRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw InputError("labeled dataset is empty");
    dimension_ = detail::check_rows(rows_, rows_.front().x.size(), "labeled");
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (!std::isfinite(rows_[i].y))
        throw InputError("labeled row " + std::to_string(i) + ": non-finite response");
  }

  std::size_t size() const { return rows_.size(); }
  std::size_t dimension() const { return dimension_; }
  const LabeledRow& operator[](std::size_t i) const { return rows_[i]; }
  std::span<const LabeledRow> rows() const { return rows_; }

 private:
  std::vector<LabeledRow> rows_;
  std::size_t dimension_ = 0;
};

// (x, s) rows. May be empty; `dimension` must match the labeled companion.
class UnlabeledDataset {
 public:
  UnlabeledDataset() = default;
  UnlabeledDataset(std::vector<UnlabeledRow> rows, std::size_t dimension)
      : rows_(std::move(rows)), dimension_(dimension) {
    detail::check_rows(rows_, dimension_, "unlabeled");
  }

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  std::size_t dimension() const { return dimension_; }
  const UnlabeledRow& operator[](std::size_t i) const { return rows_[i]; }
  std::span<const UnlabeledRow> rows() const { return rows_; }

 private:
  std::vector<UnlabeledRow> rows_;
  std::size_t dimension_ = 0;
};

enum class EstimatorKind { knn, binned };

inline const char* to_string(EstimatorKind kind) {
  return kind == EstimatorKind::knn ? "knn" : "binned";
}

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::knn;
  std::size_t neighbors = 10;
  std::size_t bins = 10;
};

// Per-group plug-in regressor for E[Y | X = x, S = s]. Predictions are
// clamped to the range of the group's training responses.
class BaseEstimator {
 public:
  struct GroupModel {
    // knn: training features (row-major) and responses
    std::vector<double> features;
    std::vector<double> responses;
    // binned: equal-width bins over [lo, hi]
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> bin_means;
    double y_min = 0.0;
    double y_max = 0.0;
  };

  BaseEstimator(EstimatorConfig config, std::size_t dimension, std::map<int, GroupModel> groups)
      : config_(config), dimension_(dimension), groups_(std::move(groups)) {}

  const EstimatorConfig& config() const { return config_; }
  EstimatorKind kind() const { return config_.kind; }
  std::size_t dimension() const { return dimension_; }
  bool has_group(int s) const { return groups_.count(s) > 0; }

  static std::size_t bin_of(const GroupModel& g, double x) {
    const std::size_t bins = g.bin_means.size();
    if (bins == 1 || !(g.hi > g.lo)) return 0;
    const double pos = (x - g.lo) / (g.hi - g.lo) * static_cast<double>(bins);
    if (!(pos > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(pos), bins - 1);
  }

  double predict(std::span<const double> x, int s) const {
    const auto it = groups_.find(s);
    if (it == groups_.end()) throw InputError("unknown group " + std::to_string(s));
    if (x.size() != dimension_)
      throw InputError("feature dimension " + std::to_string(x.size()) + ", expected " +
                       std::to_string(dimension_));
    const GroupModel& g = it->second;
    const double raw = config_.kind == EstimatorKind::knn ? predict_knn(g, x) : predict_binned(g, x[0]);
    return std::clamp(raw, g.y_min, g.y_max);
  }

 private:
  double predict_knn(const GroupModel& g, std::span<const double> x) const {
    const std::size_t n = g.responses.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < dimension_; ++c) {
        const double diff = g.features[i * dimension_ + c] - x[c];
        d2 += diff * diff;
      }
      dist[i] = {d2, i};
    }
    // pair ordering breaks distance ties by row index
    const std::size_t k = std::min(config_.neighbors, n);
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    std::sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k));
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += g.responses[dist[i].second];
    return sum / static_cast<double>(k);
  }

  static double predict_binned(const GroupModel& g, double x) {
    return g.bin_means[bin_of(g, x)];
  }

  EstimatorConfig config_;
  std::size_t dimension_;
  std::map<int, GroupModel> groups_;
};

namespace detail {

inline std::map<int, std::vector<std::size_t>> rows_by_group(const LabeledDataset& data) {
  std::map<int, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < data.size(); ++i) out[data[i].s].push_back(i);
  return out;
}

inline void set_response_range(BaseEstimator::GroupModel& g, const LabeledDataset& data,
                               const std::vector<std::size_t>& rows) {
  g.y_min = std::numeric_limits<double>::infinity();
  g.y_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i : rows) {
    g.y_min = std::min(g.y_min, data[i].y);
    g.y_max = std::max(g.y_max, data[i].y);
  }
}

}  // namespace detail

inline BaseEstimator fit_knn(const LabeledDataset& data, std::size_t neighbors) {
  if (neighbors == 0) throw InputError("neighbors must be positive");
  std::map<int, BaseEstimator::GroupModel> groups;
  for (const auto& [s, rows] : detail::rows_by_group(data)) {
    if (rows.size() < neighbors)
      throw InputError("group " + std::to_string(s) + " has " + std::to_string(rows.size()) +
                       " labeled rows, fewer than neighbors = " + std::to_string(neighbors));
    BaseEstimator::GroupModel g;
    for (std::size_t i : rows) {
      g.features.insert(g.features.end(), data[i].x.begin(), data[i].x.end());
      g.responses.push_back(data[i].y);
    }
    detail::set_response_range(g, data, rows);
    groups.emplace(s, std::move(g));
  }
  return BaseEstimator({EstimatorKind::knn, neighbors, 0}, data.dimension(), std::move(groups));
}

// Regressogram on the first (only) feature.
inline BaseEstimator fit_binned(const LabeledDataset& data, std::size_t bins) {
  if (bins == 0) throw InputError("bins must be positive");
  if (data.dimension() != 1) throw InputError("binned estimator is 1-D only");
  std::map<int, BaseEstimator::GroupModel> groups;
  for (const auto& [s, rows] : detail::rows_by_group(data)) {
    BaseEstimator::GroupModel g;
    g.lo = std::numeric_limits<double>::infinity();
    g.hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i : rows) {
      g.lo = std::min(g.lo, data[i].x[0]);
      g.hi = std::max(g.hi, data[i].x[0]);
    }
    g.bin_means.assign(bins, 0.0);
    std::vector<double> sums(bins, 0.0);
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t i : rows) {
      const std::size_t b = BaseEstimator::bin_of(g, data[i].x[0]);
      sums[b] += data[i].y;
      ++counts[b];
    }
    // empty bins take the mean of the nearest nonempty bin, lower bin on ties
    for (std::size_t b = 0; b < bins; ++b) {
      std::size_t source = b;
      for (std::size_t r = 0; counts[source] == 0; ++r) {
        if (b >= r && counts[b - r] > 0) source = b - r;
        else if (b + r < bins && counts[b + r] > 0) source = b + r;
      }
      g.bin_means[b] = sums[source] / static_cast<double>(counts[source]);
    }
    detail::set_response_range(g, data, rows);
    groups.emplace(s, std::move(g));
  }
  return BaseEstimator({EstimatorKind::binned, 0, bins}, 1, std::move(groups));
}

inline BaseEstimator fit_estimator(const LabeledDataset& data, const EstimatorConfig& config) {
  return config.kind == EstimatorKind::knn ? fit_knn(data, config.neighbors) : fit_binned(data, config.bins);
}

inline double predict_eta(const BaseEstimator& est, std::span<const double> x, int s) {
  return est.predict(x, s);
}

}  // namespace fairot
