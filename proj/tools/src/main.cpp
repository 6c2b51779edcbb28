#include <iostream>

#include <CLI11.hpp>

#include "fscre/errors.hpp"
#include "fscre/tools/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace fscre;
  using namespace fscre::tools;

  CLI::App app{"FSCRE: cellwise-robust ensemble regression and experiment runner"};
  app.set_version_flag("--version", "fscre 0.1.0");
  app.fallthrough();

  std::string config_path, mode, out_path;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  app.add_option("--config", config_path, "JSON experiment config (defaults if omitted)");
  app.add_option("--mode", mode, "fit, sweep-k, sweep-contamination, benchmark or selftest");
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--out", out_path, "Results CSV path (overrides the config)");
  app.add_option("--threads", threads, "Concurrent replications (overrides the config)");

  auto* fit_cmd = app.add_subcommand("fit-csv", "Fit an ensemble to a CSV with header y,x1..xp");
  std::string data_path, model_path, summary_path, trace_path, flags_path;
  std::size_t models = 10, folds = 5;
  double tau = 0.01;
  std::uint64_t fit_seed = 1;
  bool no_intercept = false, no_impute = false;
  fit_cmd->add_option("--data", data_path, "Training CSV")->required();
  fit_cmd->add_option("--model", model_path, "Output model JSON")->required();
  fit_cmd->add_option("--models,-K", models, "Number of sub-models");
  fit_cmd->add_option("--tau", tau, "Relative CV improvement threshold");
  fit_cmd->add_option("--folds", folds, "Cross-validation folds");
  fit_cmd->add_option("--seed", fit_seed, "Seed for folds, tie-breaks and MM starts");
  fit_cmd->add_flag("--no-intercept", no_intercept, "Fit sub-models without intercept");
  fit_cmd->add_flag("--no-impute", no_impute, "Skip deviating-cell detection");
  fit_cmd->add_option("--summary", summary_path, "Write the selection summary here");
  fit_cmd->add_option("--trace", trace_path, "Write the selection trace CSV here");
  fit_cmd->add_option("--flags", flags_path, "Write the 0/1 imputation flags CSV here");

  auto* predict_cmd = app.add_subcommand("predict-csv", "Predict with a saved model");
  std::string x_path, pred_path;
  predict_cmd->add_option("--model", model_path, "Model JSON")->required();
  predict_cmd->add_option("--x", x_path, "Predictor CSV (x1..xp, or y,x1..xp)")->required();
  predict_cmd->add_option("--out", pred_path, "Output predictions CSV")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Export one simulated dataset and its masks");
  std::string mask_path;
  sim_cmd->add_option("--data", data_path, "Output data CSV")->required();
  sim_cmd->add_option("--mask", mask_path, "Output mask CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*fit_cmd) {
      FitCsvOptions opts;
      opts.pipeline.fscre.models = models;
      opts.pipeline.fscre.tau = tau;
      opts.pipeline.fscre.cv_folds = folds;
      opts.pipeline.fscre.seed = fit_seed;
      opts.pipeline.fscre.intercept = !no_intercept;
      opts.pipeline.impute = !no_impute;
      opts.summary_path = summary_path;
      opts.trace_path = trace_path;
      opts.flags_path = flags_path;
      fit_csv(data_path, opts, model_path, std::cout);
      return kOk;
    }
    if (*predict_cmd) {
      const std::size_t rows = predict_csv(model_path, x_path, pred_path);
      std::cout << "wrote " << rows << " predictions to " << pred_path << '\n';
      return kOk;
    }

    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!mode.empty()) cfg.mode = mode_from_string(mode);
    if (app.count("--seed")) cfg.seed = seed;
    if (!out_path.empty()) cfg.output_path = out_path;
    if (app.count("--threads")) cfg.threads = threads;
    if (*sim_cmd) {
      simulate_csv(cfg, data_path, mask_path);
      std::cout << "wrote " << data_path << '\n';
      return kOk;
    }
    return run_experiment(cfg, std::cout);
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
