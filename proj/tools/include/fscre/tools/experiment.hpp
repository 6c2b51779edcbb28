#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fscre/metrics.hpp"
#include "fscre/pipeline.hpp"
#include "fscre/simgen.hpp"

namespace fscre::tools {

enum class Mode { Fit, SweepK, SweepContamination, Benchmark, Selftest };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);  // InvalidConfig on unknown names

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
  Mode mode = Mode::Fit;
  std::uint64_t seed = 1;
  std::size_t replications = 50;
  std::size_t test_size = 5000;
  std::string output_path = "results.csv";
  std::size_t threads = 1;
  bool impute = true;
  SimConfig sim;
  ContaminationSpec contamination{Scenario::MixtureCorrelation, 0.1, 0.05};
  FscreConfig fscre;
  std::vector<std::size_t> sweep_k;                       // sweep-k grid
  std::vector<ContaminationSpec> sweep_contamination;     // sweep-contamination grid
  std::vector<std::size_t> bench_n{50, 100};              // benchmark grid
  std::vector<std::size_t> bench_p{250, 500, 1000};

  ExperimentConfig();
  void validate() const;
};

// Parses a JSON document; missing fields keep their defaults. Errors are
// InvalidConfig with the offending field (or parse position) in the message.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
// Canonical JSON of everything that determines the results (no output path,
// no thread count).
std::string config_json(const ExperimentConfig& cfg);

struct Replicate {
  SimConfig sim;
  ContaminationSpec contamination;
  PipelineConfig pipeline;
  std::size_t test_size = 5000;
};

// One simulated training set, one FSCRE fit, one clean test set. Timing covers
// imputation, selection and the final robust fits only.
EvalReport run_replicate(const Replicate& r, std::uint64_t seed);

struct ResultRow {
  Mode mode = Mode::Fit;
  Scenario scenario = Scenario::Clean;
  SimConfig sim;
  double alpha = 0.0;
  std::size_t models = 0;
  double tau = 0.0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  EvalReport report;
};

std::string results_header();
std::string format_row(const ResultRow& row);

// Runs every (grid cell, replication) job on `threads` workers and returns the
// rows in job order.
std::vector<ResultRow> run_jobs(const ExperimentConfig& cfg);

// Writes "# config ..." + header + rows. Benchmark mode also writes
// <output>.summary.csv with the median time per (n, p) cell.
void write_results(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows);

struct BenchmarkCell {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t reps = 0;
  double median_seconds = 0.0;
};
std::vector<BenchmarkCell> summarize_benchmark(const std::vector<ResultRow>& rows);

struct SelftestOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};
std::vector<SelftestOutcome> run_selftest(std::uint64_t seed, std::size_t instances);

// Returns a process exit code: 0 ok, 3 when a selftest check failed.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Single-dataset plumbing on user CSV files.
struct FitCsvOptions {
  PipelineConfig pipeline;
  std::string summary_path;  // empty: summary goes to the log stream only
  std::string trace_path;    // empty: no trace export
  std::string flags_path;    // empty: no export of imputation flags
};
EnsembleModel fit_csv(const std::string& data_path, const FitCsvOptions& opts,
                      const std::string& model_out, std::ostream& log);
std::size_t predict_csv(const std::string& model_path, const std::string& x_path,
                        const std::string& out_path);

// Exports one simulated (and contaminated) dataset with its masks.
void simulate_csv(const ExperimentConfig& cfg, const std::string& data_path,
                  const std::string& mask_path);

}  // namespace fscre::tools
