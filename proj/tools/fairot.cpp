// fairot: project regression scores to demographic parity.
//
//   fairot synth   --out DIR [--seed N] [scenario flags]
//   fairot fit     --labeled F [--unlabeled F] | --scores F  --out DIR [--estimator knn|binned] ...
//   fairot audit   --scores predictions.csv --out report.json [--threshold T] [--format json|csv]
//   fairot project --scores scores.csv --model model.json --out predictions.csv
//
// Exit codes: 0 success, 2 input/schema error, 3 numerical-contract violation.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fairot/cli.hpp"

int main(int argc, char** argv) {
  using namespace fairot;

  CLI::App app{"Demographic-parity projection of regression scores by 1D optimal transport"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string labeled, unlabeled, scores, model;
  std::string estimator = "knn";
  std::size_t neighbors = 10;
  std::size_t bins = 10;
  double threshold = 0.0;
  std::string format = "json";

  synth::SynthConfig synth_cfg;

  auto* synth_cmd = app.add_subcommand("synth", "Write a seeded Gaussian two-group scenario");
  synth_cmd->add_option("--out", out, "Output directory")->required();
  synth_cmd->add_option("--seed", seed, "Random seed");
  synth_cmd->add_option("--n-labeled", synth_cfg.n_labeled, "Labeled rows");
  synth_cmd->add_option("--n-unlabeled", synth_cfg.n_unlabeled, "Unlabeled rows");
  synth_cmd->add_option("--weights", synth_cfg.group_weights, "Group weights")->delimiter(',');
  synth_cmd->add_option("--means", synth_cfg.group_means, "Group means")->delimiter(',');
  synth_cmd->add_option("--slope", synth_cfg.slope, "Slope of Y on X");
  synth_cmd->add_option("--feature-sd", synth_cfg.feature_sd, "Standard deviation of X");
  synth_cmd->add_option("--noise-sd", synth_cfg.noise_sd, "Standard deviation of the noise");

  auto* fit_cmd = app.add_subcommand("fit", "Fit the fair regressor and project all rows");
  fit_cmd->add_option("--labeled", labeled, "Labeled CSV (y,x1..xd,s)");
  fit_cmd->add_option("--unlabeled", unlabeled, "Unlabeled CSV (x1..xd,s)");
  fit_cmd->add_option("--scores", scores, "Precomputed scores CSV (row_id,s,score)");
  fit_cmd->add_option("--out", out, "Output directory")->required();
  fit_cmd->add_option("--estimator", estimator, "Base estimator")->check(CLI::IsMember({"knn", "binned"}));
  fit_cmd->add_option("--neighbors", neighbors, "Neighbors for knn")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--bins", bins, "Bins for binned")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", seed, "Random seed");

  auto* audit_cmd = app.add_subcommand("audit", "Risk and fairness report for a predictions file");
  audit_cmd->add_option("--scores,--predictions", scores, "Predictions CSV")->required();
  audit_cmd->add_option("--out", out, "Report path")->required();
  auto* threshold_opt = audit_cmd->add_option("--threshold", threshold, "Decision threshold for disparate impact");
  audit_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));

  auto* project_cmd = app.add_subcommand("project", "Project precomputed scores with a fitted model");
  project_cmd->add_option("--scores", scores, "Scores CSV (row_id,s,score)")->required();
  project_cmd->add_option("--model", model, "model.json")->required();
  project_cmd->add_option("--out", out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth_cmd) {
      synth_cfg.seed = seed;
      cli::cmd_synth(synth_cfg, out);
    } else if (*fit_cmd) {
      cli::FitOptions opt;
      opt.labeled = labeled;
      opt.unlabeled = unlabeled;
      opt.scores = scores;
      opt.out_dir = out;
      opt.estimator = {estimator == "knn" ? EstimatorKind::knn : EstimatorKind::binned, neighbors, bins};
      opt.seed = seed;
      cli::cmd_fit(opt);
    } else if (*audit_cmd) {
      cli::AuditOptions opt;
      opt.predictions = scores;
      opt.out = out;
      if (*threshold_opt) opt.threshold = threshold;
      opt.format = format == "csv" ? cli::ReportFormat::csv : cli::ReportFormat::json;
      cli::cmd_audit(opt);
    } else if (*project_cmd) {
      cli::cmd_project({scores, model, out});
    }
  } catch (const InputError& e) {
    std::cerr << "fairot: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "fairot: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "fairot: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
