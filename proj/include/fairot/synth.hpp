#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "fairot/distributions.hpp"
#include "fairot/error.hpp"
#include "fairot/random.hpp"
#include "fairot/regressors.hpp"

namespace fairot::synth {

// S ~ Categorical(group_weights), X | S ~ N(0, feature_sd^2),
// Y = m_S + slope * X + N(0, noise_sd^2).
struct SynthConfig {
  std::vector<double> group_weights{0.5, 0.5};
  std::vector<double> group_means{0.0, 4.0};
  double feature_sd = 1.0;
  double noise_sd = 1.0;
  double slope = 1.0;
  std::size_t n_labeled = 5000;
  std::size_t n_unlabeled = 5000;
  std::uint64_t seed = 1;

  void validate() const {
    if (group_weights.empty()) throw InputError("synth needs at least one group");
    if (group_weights.size() != group_means.size())
      throw InputError("synth group weights and means differ in length");
    double total = 0.0;
    for (double w : group_weights) {
      if (!(w > 0.0)) throw InputError("synth group weights must be positive");
      total += w;
    }
    if (std::abs(total - 1.0) > kWeightTolerance) throw InputError("synth group weights must sum to 1");
    if (!(feature_sd > 0.0) || !(noise_sd > 0.0)) throw InputError("synth standard deviations must be positive");
    if (n_labeled == 0) throw InputError("synth needs at least one labeled row");
  }
};

// Closed-form population quantities of a scenario.
struct GroundTruth {
  std::vector<double> group_weights;
  std::vector<double> group_means;
  double slope = 0.0;
  double score_sd = 0.0;  // |slope| * feature_sd, common to all groups
  double barycenter_mean = 0.0;
  double barycenter_sd = 0.0;
  double cost_of_fairness = 0.0;

  // eta(x, s) = m_s + slope * x, s 1-based
  double eta(double x, int s) const { return group_means.at(static_cast<std::size_t>(s - 1)) + slope * x; }
};

struct Scenario {
  LabeledDataset labeled;
  UnlabeledDataset unlabeled;
  GroundTruth truth;
};

inline GroundTruth ground_truth(const SynthConfig& cfg) {
  GroundTruth t;
  t.group_weights = cfg.group_weights;
  t.group_means = cfg.group_means;
  t.slope = cfg.slope;
  t.score_sd = std::abs(cfg.slope) * cfg.feature_sd;
  for (std::size_t s = 0; s < cfg.group_means.size(); ++s)
    t.barycenter_mean += cfg.group_weights[s] * cfg.group_means[s];
  t.barycenter_sd = t.score_sd;
  for (std::size_t s = 0; s < cfg.group_means.size(); ++s) {
    const double d = cfg.group_means[s] - t.barycenter_mean;
    t.cost_of_fairness += cfg.group_weights[s] * d * d;
  }
  return t;
}

namespace detail {

inline int draw_group(const std::vector<double>& weights, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t s = 0; s + 1 < weights.size(); ++s) {
    acc += weights[s];
    if (u < acc) return static_cast<int>(s) + 1;
  }
  return static_cast<int>(weights.size());
}

}  // namespace detail

inline Scenario gen_gaussian_groups(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(splitmix64(cfg.seed));
  std::vector<LabeledRow> labeled;
  labeled.reserve(cfg.n_labeled);
  for (std::size_t i = 0; i < cfg.n_labeled; ++i) {
    const int s = detail::draw_group(cfg.group_weights, rng);
    const double x = cfg.feature_sd * standard_normal(rng);
    const double y = cfg.group_means[static_cast<std::size_t>(s - 1)] + cfg.slope * x +
                     cfg.noise_sd * standard_normal(rng);
    labeled.push_back({y, {x}, s});
  }
  std::vector<UnlabeledRow> unlabeled;
  unlabeled.reserve(cfg.n_unlabeled);
  for (std::size_t i = 0; i < cfg.n_unlabeled; ++i) {
    const int s = detail::draw_group(cfg.group_weights, rng);
    unlabeled.push_back({{cfg.feature_sd * standard_normal(rng)}, s});
  }
  return Scenario{LabeledDataset(std::move(labeled)), UnlabeledDataset(std::move(unlabeled), 1),
                  ground_truth(cfg)};
}

// True scores eta(X_i, S_i) over labeled then unlabeled rows.
inline std::vector<double> true_scores(const Scenario& sc) {
  std::vector<double> out;
  out.reserve(sc.labeled.size() + sc.unlabeled.size());
  for (const auto& r : sc.labeled.rows()) out.push_back(sc.truth.eta(r.x[0], r.s));
  for (const auto& r : sc.unlabeled.rows()) out.push_back(sc.truth.eta(r.x[0], r.s));
  return out;
}

inline std::vector<int> row_groups(const Scenario& sc) {
  std::vector<int> out;
  out.reserve(sc.labeled.size() + sc.unlabeled.size());
  for (const auto& r : sc.labeled.rows()) out.push_back(r.s);
  for (const auto& r : sc.unlabeled.rows()) out.push_back(r.s);
  return out;
}

// W2^2 between an atomic distribution and N(mean, sd^2), integrating each
// atom's quantile interval (a, b] in closed form with z = Phi^{-1}(t):
//   int (c - sd z)^2 dt = c^2 (b - a) - 2 c sd [phi(z_a) - phi(z_b)]
//                         + sd^2 [(b - a) - z_b phi(z_b) + z_a phi(z_a)],
// where c = x - mean.
inline double w2_squared_to_gaussian(const EmpiricalDistribution& d, double mean, double sd) {
  const boost::math::normal standard;
  auto z_of = [&](double t) {
    if (t <= 0.0) return -HUGE_VAL;
    if (t >= 1.0) return HUGE_VAL;
    return boost::math::quantile(standard, t);
  };
  auto phi = [](double z) { return std::isinf(z) ? 0.0 : std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
  auto z_phi = [&](double z) { return std::isinf(z) ? 0.0 : z * phi(z); };

  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double a = d.level_below(i);
    const double b = d.cumulative()[i];
    const double za = z_of(a);
    const double zb = z_of(b);
    const double c = d.value(i) - mean;
    total += c * c * (b - a) - 2.0 * c * sd * (phi(za) - phi(zb)) +
             sd * sd * ((b - a) - z_phi(zb) + z_phi(za));
  }
  return std::max(total, 0.0);
}

}  // namespace fairot::synth
