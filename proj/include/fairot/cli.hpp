#pragma once

// Subcommand bodies of the fairot tool, callable in-process.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fairot/error.hpp"
#include "fairot/io.hpp"
#include "fairot/metrics.hpp"
#include "fairot/projection.hpp"
#include "fairot/regressors.hpp"
#include "fairot/synth.hpp"

namespace fairot::cli {

enum class ReportFormat { json, csv };

struct FitOptions {
  std::filesystem::path labeled;    // y,x1..xd,s
  std::filesystem::path unlabeled;  // optional x1..xd,s
  std::filesystem::path scores;     // alternative input: row_id,s,score
  std::filesystem::path out_dir = ".";
  EstimatorConfig estimator;
  std::uint64_t seed = kDefaultSeed;
};

struct AuditOptions {
  std::filesystem::path predictions;
  std::filesystem::path out = "report.json";
  std::optional<double> threshold;  // defaults to the pooled median of g_hat
  ReportFormat format = ReportFormat::json;
};

struct ProjectOptions {
  std::filesystem::path scores;
  std::filesystem::path model;
  std::filesystem::path out = "predictions.csv";
};

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw InputError("cannot create directory " + dir.string());
}

inline nlohmann::ordered_json truth_json(const synth::SynthConfig& cfg, const synth::GroundTruth& t) {
  return {{"k", cfg.group_weights.size()},
          {"group_weights", cfg.group_weights},
          {"group_means", cfg.group_means},
          {"slope", cfg.slope},
          {"feature_sd", cfg.feature_sd},
          {"noise_sd", cfg.noise_sd},
          {"score_sd", t.score_sd},
          {"barycenter_mean", t.barycenter_mean},
          {"barycenter_sd", t.barycenter_sd},
          {"cost_of_fairness", t.cost_of_fairness},
          {"n_labeled", cfg.n_labeled},
          {"n_unlabeled", cfg.n_unlabeled},
          {"seed", cfg.seed}};
}

// labeled.csv, unlabeled.csv, truth.json
inline void cmd_synth(const synth::SynthConfig& cfg, const std::filesystem::path& out_dir) {
  const auto scenario = synth::gen_gaussian_groups(cfg);
  ensure_directory(out_dir);
  io::write_file_atomic(out_dir / "labeled.csv", io::labeled_csv(scenario.labeled));
  io::write_file_atomic(out_dir / "unlabeled.csv", io::unlabeled_csv(scenario.unlabeled));
  io::write_file_atomic(out_dir / "truth.json", truth_json(cfg, scenario.truth).dump(2) + "\n");
}

namespace detail {

struct ScoreRows {
  std::vector<long long> row_ids;
  std::vector<int> groups;
  std::vector<double> scores;
};

// row_id,s,score
inline ScoreRows parse_scores(const io::CsvTable& t) {
  const auto id_col = t.column("row_id");
  const auto s_col = t.column("s");
  const auto score_col = t.column("score");
  ScoreRows rows;
  for (std::size_t r = 0; r < t.size(); ++r) {
    rows.row_ids.push_back(t.integer(r, id_col));
    if (rows.row_ids.back() < 0) throw t.cell_error(r, id_col, "row ids must be nonnegative");
    rows.groups.push_back(t.group(r, s_col));
    rows.scores.push_back(t.number(r, score_col));
  }
  if (rows.scores.empty()) throw InputError("scores file has no data rows");
  return rows;
}

}  // namespace detail

// model.json + predictions.csv (row_id,s,eta_hat,g_hat,y).
inline FairRegressorModel cmd_fit(const FitOptions& opt) {
  std::optional<FairRegressorModel> fitted;
  std::vector<std::optional<double>> responses;
  if (!opt.scores.empty()) {
    auto rows = detail::parse_scores(io::CsvTable::load(opt.scores));
    fitted = fit_fair_from_scores(std::move(rows.scores), std::move(rows.groups), opt.seed);
  } else {
    if (opt.labeled.empty()) throw InputError("fit needs --labeled or --scores");
    const auto labeled = io::parse_labeled(io::CsvTable::load(opt.labeled), opt.labeled.filename().string());
    UnlabeledDataset unlabeled({}, labeled.dimension());
    if (!opt.unlabeled.empty())
      unlabeled = io::parse_unlabeled(io::CsvTable::load(opt.unlabeled), labeled.dimension(),
                                      opt.unlabeled.filename().string());
    fitted = fit_fair_regressor(labeled, unlabeled, opt.estimator, opt.seed);
    for (const auto& r : labeled.rows()) responses.emplace_back(r.y);
  }
  FairRegressorModel model = std::move(*fitted);
  responses.resize(model.scores.size());

  const auto g_hat = predict_fair_all(model);
  std::string csv = "row_id,s,eta_hat,g_hat,y\n";
  for (std::size_t i = 0; i < g_hat.size(); ++i) {
    csv += std::to_string(i) + "," + std::to_string(model.groups[i]) + "," + io::format_double(model.scores[i]) +
           "," + io::format_double(g_hat[i]) + "," + (responses[i] ? io::format_double(*responses[i]) : "") + "\n";
  }
  ensure_directory(opt.out_dir);
  io::write_file_atomic(opt.out_dir / "model.json", io::model_json(model).dump(1) + "\n");
  io::write_file_atomic(opt.out_dir / "predictions.csv", csv);
  return model;
}

inline nlohmann::ordered_json audit_report(const io::CsvTable& t, std::optional<double> threshold) {
  const auto s_col = t.column("s");
  const auto eta_col = t.find_column("eta_hat") ? t.column("eta_hat") : t.column("score");
  const auto g_col = t.column("g_hat");
  const auto y_col = t.find_column("y");

  std::vector<int> groups;
  std::vector<double> eta, g;
  std::vector<int> y_groups;
  std::vector<double> y, eta_y, g_y;
  for (std::size_t r = 0; r < t.size(); ++r) {
    groups.push_back(t.group(r, s_col));
    eta.push_back(t.number(r, eta_col));
    g.push_back(t.number(r, g_col));
    if (y_col) {
      if (const auto v = t.optional_number(r, *y_col)) {
        y.push_back(*v);
        y_groups.push_back(groups.back());
        eta_y.push_back(eta.back());
        g_y.push_back(g.back());
      }
    }
  }
  if (groups.empty()) throw InputError("predictions file has no data rows");

  const GroupedPredictions eta_pred(eta, groups);
  const GroupedPredictions g_pred(g, groups);
  if (!threshold) {
    auto sorted = g;
    std::sort(sorted.begin(), sorted.end());
    threshold = sorted[(sorted.size() - 1) / 2];
  }

  nlohmann::ordered_json report;
  report["n"] = groups.size();
  report["k"] = eta_pred.by_group().size();
  if (!y.empty()) {
    report["quadratic_risk_eta_hat"] = quadratic_risk(GroupedPredictions(eta_y, y_groups, y));
    report["quadratic_risk_g_hat"] = quadratic_risk(GroupedPredictions(g_y, y_groups, y));
  }
  report["cost_of_fairness"] = cost_of_fairness(profile_from_scores(eta, groups));
  report["dp_gap_eta_hat"] = dp_gap(eta_pred);
  report["dp_gap_g_hat"] = dp_gap(g_pred);
  report["conditional_mean_variance_eta_hat"] = conditional_mean_variance(eta_pred);
  report["conditional_mean_variance_g_hat"] = conditional_mean_variance(g_pred);
  report["threshold"] = *threshold;
  for (const auto& [name, pred] : {std::pair{"eta_hat", &eta_pred}, std::pair{"g_hat", &g_pred}}) {
    for (const auto& [s, values] : pred->by_group()) {
      if (s == 1) continue;
      const std::string key = std::string("disparate_impact_") + name + "_1_vs_" + std::to_string(s);
      try {
        report[key] = disparate_impact(*pred, *threshold, 1, s);
      } catch (const NumericalError&) {
        report[key] = nullptr;
      } catch (const InputError&) {
        report[key] = nullptr;
      }
    }
  }
  return report;
}

inline std::string report_csv(const nlohmann::ordered_json& report) {
  std::string out = "metric,value\n";
  for (const auto& [key, value] : report.items()) {
    out += key + ",";
    if (value.is_number_float()) out += io::format_double(value.get<double>());
    else if (!value.is_null()) out += value.dump();
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json cmd_audit(const AuditOptions& opt) {
  const auto report = audit_report(io::CsvTable::load(opt.predictions), opt.threshold);
  const std::string body = opt.format == ReportFormat::json ? report.dump(2) + "\n" : report_csv(report);
  if (opt.out.has_parent_path()) ensure_directory(opt.out.parent_path());
  io::write_file_atomic(opt.out, body);
  return report;
}

// row_id,s,score,g_hat,extrapolated. Scores on the model's support are
// projected with the row's random stream; others go through fair_map.
inline void cmd_project(const ProjectOptions& opt) {
  const auto model = io::load_model(opt.model);
  const auto rows = detail::parse_scores(io::CsvTable::load(opt.scores));
  std::string csv = "row_id,s,score,g_hat,extrapolated\n";
  for (std::size_t i = 0; i < rows.scores.size(); ++i) {
    const int s = rows.groups[i];
    const auto& d = model.profile[model.profile.require_index(s)].distribution;
    const double y = rows.scores[i];
    const bool in_support = d.find_atom(y).has_value();
    double out;
    if (in_support) {
      Rng rng = row_stream(model.seed, static_cast<std::uint64_t>(rows.row_ids[i]));
      out = randomized_project(model, s, y, rng);
    } else {
      out = fair_map(model.profile, s, y);
    }
    csv += std::to_string(rows.row_ids[i]) + "," + std::to_string(s) + "," + io::format_double(y) + "," +
           io::format_double(out) + "," + (in_support ? "false" : "true") + "\n";
  }
  if (opt.out.has_parent_path()) ensure_directory(opt.out.parent_path());
  io::write_file_atomic(opt.out, csv);
}

}  // namespace fairot::cli
