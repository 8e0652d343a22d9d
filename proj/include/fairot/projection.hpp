#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairot/distributions.hpp"
#include "fairot/error.hpp"
#include "fairot/random.hpp"
#include "fairot/regressors.hpp"
#include "fairot/transport.hpp"

namespace fairot {

inline constexpr std::uint64_t kDefaultSeed = 20200707;

// Fitted post-processor: the empirical score profile of the base estimator
// over all n + m rows, its comonotone coupling and barycenter, plus the
// in-sample rows (base score and group) it was fitted on.
struct FairRegressorModel {
  std::optional<BaseEstimator> base;        // absent when scores were supplied directly
  std::optional<EstimatorConfig> estimator;  // kind and hyperparameters, if fitted here
  FairnessProfile profile;
  MultimarginalCoupling coupling;
  EmpiricalDistribution barycenter;
  std::uint64_t seed = kDefaultSeed;
  std::vector<double> scores;
  std::vector<int> groups;
};

// Profile of per-row scores grouped by label, weighted by group frequency.
// Labels must cover 1..k without gaps.
inline FairnessProfile profile_from_scores(std::span<const double> scores, std::span<const int> groups) {
  if (scores.size() != groups.size()) throw InputError("scores and groups differ in length");
  if (scores.empty()) throw InputError("no rows to build a fairness profile from");
  std::map<int, std::vector<double>> by_group;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (groups[i] < 1) throw InputError("group labels are 1-based");
    by_group[groups[i]].push_back(scores[i]);
  }
  const int k = by_group.rbegin()->first;
  std::vector<GroupDistribution> entries;
  const double total = static_cast<double>(scores.size());
  for (int s = 1; s <= k; ++s) {
    const auto it = by_group.find(s);
    if (it == by_group.end()) throw InputError("group " + std::to_string(s) + " has no rows");
    entries.push_back({s, static_cast<double>(it->second.size()) / total, from_samples(it->second)});
  }
  return FairnessProfile(std::move(entries));
}

// g*(x, s) = sum_t pi_t F_t^{-1}(F_s(y)) for a score y of group s. Exact for
// atomless profiles; on atomic ones it is the deterministic counterpart of
// randomized_project and also serves scores outside the fitted support.
inline double fair_map(const FairnessProfile& profile, int s, double y) {
  const double level = profile[profile.require_index(s)].distribution.cdf(y);
  double out = 0.0;
  for (const auto& g : profile) out += g.weight * g.distribution.quantile(level);
  return out;
}

// Draws a level uniformly inside the atom of y and returns the barycenter
// value of the coupling segment at that level.
inline double randomized_project(const FairnessProfile& profile, const MultimarginalCoupling& coupling,
                                 int s, double y, Rng& rng) {
  const auto& d = profile[profile.require_index(s)].distribution;
  if (!d.find_atom(y)) throw InputError("score not in empirical support");
  const double t = randomized_rank(d, y, rng);
  return coupling[coupling.segment_index(t)].barycenter_value;
}

inline double randomized_project(const FairRegressorModel& model, int s, double y, Rng& rng) {
  return randomized_project(model.profile, model.coupling, s, y, rng);
}

// Exact law of randomized_project(profile, coupling, s, y, .).
inline EmpiricalDistribution projected_law(const FairnessProfile& profile,
                                           const MultimarginalCoupling& coupling, int s, double y) {
  const auto& d = profile[profile.require_index(s)].distribution;
  const auto atom = d.find_atom(y);
  if (!atom) throw InputError("score not in empirical support");
  const double lo = d.level_below(*atom);
  const double hi = d.cumulative()[*atom];
  std::vector<double> values;
  std::vector<double> lengths;
  for (std::size_t i = coupling.segment_index(hi); ; --i) {
    const auto& seg = coupling[i];
    if (seg.level_hi <= lo) break;
    values.push_back(seg.barycenter_value);
    lengths.push_back(std::min(seg.level_hi, hi) - std::max(seg.level_lo, lo));
    if (i == 0) break;
  }
  return from_samples(values, lengths);
}

namespace detail {

inline FairRegressorModel assemble_model(std::vector<double> scores, std::vector<int> groups,
                                         std::uint64_t seed) {
  auto profile = profile_from_scores(scores, groups);
  auto coupling = comonotone_coupling(profile);
  auto bary = barycenter(coupling);
  return FairRegressorModel{std::nullopt, std::nullopt, std::move(profile), std::move(coupling),
                            std::move(bary), seed, std::move(scores), std::move(groups)};
}

}  // namespace detail

// Transductive fair regressor:
//   1. fit the base estimator on the labeled rows;
//   2. score all n + m rows and group the scores by s;
//   3. weight groups by N_s / (n + m) and build the comonotone coupling;
//   4. per-row projections come from predict_fair.
// Rows are indexed labeled first, then unlabeled.
inline FairRegressorModel fit_fair_regressor(const LabeledDataset& labeled, const UnlabeledDataset& unlabeled,
                                             const EstimatorConfig& config, std::uint64_t seed) {
  if (!unlabeled.empty() && unlabeled.dimension() != labeled.dimension())
    throw InputError("unlabeled feature dimension differs from labeled");
  auto base = fit_estimator(labeled, config);

  std::vector<double> scores;
  std::vector<int> groups;
  scores.reserve(labeled.size() + unlabeled.size());
  groups.reserve(labeled.size() + unlabeled.size());
  for (const auto& row : labeled.rows()) {
    scores.push_back(base.predict(row.x, row.s));
    groups.push_back(row.s);
  }
  for (const auto& row : unlabeled.rows()) {
    if (!base.has_group(row.s))
      throw InputError("group " + std::to_string(row.s) + " has no labeled rows to fit on");
    scores.push_back(base.predict(row.x, row.s));
    groups.push_back(row.s);
  }

  auto model = detail::assemble_model(std::move(scores), std::move(groups), seed);
  model.base = std::move(base);
  model.estimator = model.base->config();
  return model;
}

// Same pipeline from precomputed base scores (steps 2-4).
inline FairRegressorModel fit_fair_from_scores(std::vector<double> scores, std::vector<int> groups,
                                               std::uint64_t seed) {
  return detail::assemble_model(std::move(scores), std::move(groups), seed);
}

// Projection of in-sample row `row_index`, using the row's own random
// stream derived from the model seed.
inline double predict_fair(const FairRegressorModel& model, std::size_t row_index, Rng& rng) {
  if (row_index >= model.scores.size())
    throw InputError("row index " + std::to_string(row_index) + " out of range");
  return randomized_project(model, model.groups[row_index], model.scores[row_index], rng);
}

inline double predict_fair(const FairRegressorModel& model, std::size_t row_index) {
  Rng rng = row_stream(model.seed, row_index);
  return predict_fair(model, row_index, rng);
}

inline std::vector<double> predict_fair_all(const FairRegressorModel& model) {
  std::vector<double> out(model.scores.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict_fair(model, i);
  return out;
}

}  // namespace fairot
