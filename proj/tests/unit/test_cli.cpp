#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "fscre/errors.hpp"
#include "fscre/tools/experiment.hpp"

using namespace fscre;
using namespace fscre::tools;

namespace {

const std::string kFixture = FSCRE_TEST_DATA_DIR "/fixture_50x20.csv";
const std::string kCli = FSCRE_CLI_PATH;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Everything but the trailing cpu_seconds field.
std::string without_timing(const std::string& text) {
  std::string out;
  for (const auto& l : lines(text)) out += l.substr(0, l.rfind(',')) + '\n';
  return out;
}

int run_cli(const std::string& args) {
  const int status = std::system((kCli + " " + args + " > cli_stdout.txt 2> cli_stderr.txt").c_str());
  return WEXITSTATUS(status);
}

ExperimentConfig tiny(Mode mode) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.sim.n = 40;
  cfg.sim.p = 60;
  cfg.sim.sparsity = 10;
  cfg.sim.block_size = 5;
  cfg.replications = 3;
  cfg.test_size = 500;
  return cfg;
}

}  // namespace

TEST_CASE("config defaults match the headline setting") {
  const ExperimentConfig cfg = parse_config("{}");
  CHECK(cfg.sim.n == 50);
  CHECK(cfg.sim.p == 500);
  CHECK(cfg.sim.snr == 1.0);
  CHECK(cfg.fscre.models == 10);
  CHECK(cfg.contamination.scenario == Scenario::MixtureCorrelation);
  CHECK(cfg.test_size == 5000);
}

TEST_CASE("config parsing: fields, overrides and errors") {
  const ExperimentConfig cfg = parse_config(R"({"mode": "sweep-k", "seed": 9,
      "sim": {"n": 60, "p": 100, "sparsity": 10},
      "contamination": {"scenario": "cellwise-marginal", "alpha": 0.1, "alpha2": 0},
      "fscre": {"models": 4, "tau": 0.02, "max_vars": 12}, "sweep_k": [1, 3]})");
  CHECK(cfg.mode == Mode::SweepK);
  CHECK(cfg.seed == 9);
  CHECK(cfg.sim.p == 100);
  CHECK(cfg.contamination.scenario == Scenario::CellwiseMarginal);
  CHECK(cfg.fscre.models == 4);
  CHECK(*cfg.fscre.max_vars == 12);
  CHECK(cfg.sweep_k == std::vector<std::size_t>{1, 3});

  try {
    parse_config("{\n  \"seed\": 1,\n  \"sim\": {\"n\": }\n}");
    FAIL("expected a parse error");
  } catch (const InvalidConfig& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_WITH_AS(parse_config(R"({"sim": {"n": "fifty"}})"), doctest::Contains("sim.n"),
                       InvalidConfig);
  CHECK_THROWS_WITH_AS(parse_config(R"({"fscre": {"K": 3}})"), doctest::Contains("fscre.K"),
                       InvalidConfig);
  CHECK_THROWS_AS(parse_config(R"({"mode": "plot"})"), InvalidConfig);
  ExperimentConfig bad = tiny(Mode::Fit);
  bad.replications = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidConfig);
}

TEST_CASE("shipped example configs parse and validate") {
  for (const char* name : {"headline", "sweep_k", "scenarios", "benchmark"}) {
    INFO(name);
    const ExperimentConfig cfg = load_config(std::string(FSCRE_CONFIG_DIR "/") + name + ".json");
    CHECK_NOTHROW(cfg.validate());
  }
}

TEST_CASE("fit mode smoke run: 3 rows, schema header") {
  ExperimentConfig cfg = tiny(Mode::Fit);
  cfg.contamination = {Scenario::Clean, 0.0, 0.0};
  cfg.output_path = "cli_fit.csv";
  std::ostringstream log;
  const double seconds = timed([&] { CHECK(run_experiment(cfg, log) == 0); });
  CHECK(seconds < 10.0);
  const auto rows = lines(slurp(cfg.output_path));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].rfind("# config {", 0) == 0);
  CHECK(rows[1] == results_header());
  CHECK(rows[1] ==
        "schema_version,mode,scenario,n,p,sparsity,snr,alpha,K,tau,rep,seed,mspe,recall,"
        "precision,selected_count,cpu_seconds");
  CHECK(rows[2].rfind("1,fit,clean,40,60,10,", 0) == 0);
}

TEST_CASE("sweep-k: one row per (K, replication), paired seeds") {
  ExperimentConfig cfg = tiny(Mode::SweepK);
  cfg.sweep_k = {1, 2, 4};
  cfg.replications = 2;
  const auto rows = run_jobs(cfg);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].models == 1);
  CHECK(rows[5].models == 4);
  CHECK(rows[0].seed == rows[2].seed);
  CHECK(rows[0].seed != rows[1].seed);
}

TEST_CASE("sweep-contamination covers every listed scenario") {
  ExperimentConfig cfg = tiny(Mode::SweepContamination);
  cfg.replications = 1;
  cfg.sweep_contamination = {{Scenario::Casewise, 0.1, 0.0}, {Scenario::CellwiseMarginal, 0.05, 0.0}};
  const auto rows = run_jobs(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].scenario == Scenario::Casewise);
  CHECK(rows[1].scenario == Scenario::CellwiseMarginal);
}

TEST_CASE("benchmark mode writes a median summary per grid cell") {
  ExperimentConfig cfg = tiny(Mode::Benchmark);
  cfg.bench_n = {40, 60};
  cfg.bench_p = {30, 60};
  cfg.replications = 2;
  cfg.output_path = "cli_bench.csv";
  std::ostringstream log;
  CHECK(run_experiment(cfg, log) == 0);
  const auto summary = lines(slurp("cli_bench.csv.summary.csv"));
  REQUIRE(summary.size() == 5);
  CHECK(summary[0] == "n,p,reps,median_cpu_seconds");
  CHECK(summary[1].rfind("40,30,2,", 0) == 0);
  CHECK(summary[4].rfind("60,60,2,", 0) == 0);
}

TEST_CASE("results are identical across runs and thread counts, timing aside") {
  ExperimentConfig cfg = tiny(Mode::Fit);
  cfg.replications = 4;
  cfg.output_path = "cli_det_a.csv";
  std::ostringstream log;
  run_experiment(cfg, log);
  cfg.output_path = "cli_det_b.csv";
  cfg.threads = 3;
  run_experiment(cfg, log);
  CHECK(without_timing(slurp("cli_det_a.csv")) == without_timing(slurp("cli_det_b.csv")));
}

TEST_CASE("fit_csv on the bundled fixture, then predict_csv") {
  FitCsvOptions opts;
  opts.summary_path = "cli_summary.txt";
  opts.trace_path = "cli_trace.csv";
  opts.flags_path = "cli_flags.csv";
  std::ostringstream log;
  const EnsembleModel model = fit_csv(kFixture, opts, "cli_model.json", log);
  CHECK(model.p == 20);
  CHECK(model.sets.size() == 10);
  std::set<Index> seen;
  for (const auto& s : model.sets)
    for (Index j : s) CHECK(seen.insert(j).second);
  CHECK(log.str().find("model 1:") != std::string::npos);
  CHECK(slurp("cli_summary.txt") == log.str());
  CHECK(lines(slurp("cli_trace.csv")).front() ==
        "iteration,model,candidate,gamma,benefit,winner,stop_reason");
  const CsvTable flags = read_csv("cli_flags.csv");
  CHECK(flags.values.rows() == 50);
  CHECK(flags.values.cols() == 21);
  CHECK(flags.header.front() == "y");

  CHECK(predict_csv("cli_model.json", kFixture, "cli_pred.csv") == 50);
  const CsvTable preds = read_csv("cli_pred.csv");
  const Dataset data = dataset_from_table(read_csv(kFixture));
  // In-sample predictions beat the null model.
  double mean = 0.0;
  for (double v : data.y) mean += v;
  mean /= static_cast<double>(data.n());
  const Vector null_pred(data.n(), mean);
  CHECK(mspe(data.y, preds.values.column(0)) < mspe(data.y, null_pred));
}

TEST_CASE("predict_csv: one row in, one row out; wrong width rejected") {
  FitCsvOptions opts;
  std::ostringstream log;
  fit_csv(kFixture, opts, "cli_model2.json", log);
  const CsvTable table = read_csv(kFixture);
  {
    std::ofstream out("cli_one_row.csv");
    for (std::size_t j = 1; j < table.header.size(); ++j) out << (j > 1 ? "," : "") << table.header[j];
    out << '\n';
    for (std::size_t j = 1; j < table.header.size(); ++j) out << (j > 1 ? "," : "") << table.values(0, j);
    out << '\n';
  }
  CHECK(predict_csv("cli_model2.json", "cli_one_row.csv", "cli_one_pred.csv") == 1);
  {
    std::ofstream out("cli_narrow.csv");
    out << "x1,x2\n1,2\n";
  }
  CHECK_THROWS_WITH_AS(predict_csv("cli_model2.json", "cli_narrow.csv", "cli_bad.csv"),
                       doctest::Contains("expects 20 predictor columns, found 2"), ShapeMismatch);
}

TEST_CASE("fit_csv: single predictor leaves at most one nonempty model") {
  {
    std::ofstream out("cli_single.csv");
    out << "y,x1\n";
    RandomSource rng(1);
    for (int i = 0; i < 30; ++i) {
      const double x = rng.normal();
      out << 2 * x + 0.1 * rng.normal() << ',' << x << '\n';
    }
  }
  std::ostringstream log;
  const EnsembleModel m = fit_csv("cli_single.csv", {}, "cli_single.json", log);
  std::size_t nonempty = 0;
  for (const auto& s : m.sets) nonempty += !s.empty();
  CHECK(nonempty <= 1);
  CHECK(m.sets.size() == 10);
}

TEST_CASE("fit_csv: constant column is reported by name") {
  {
    std::ofstream out("cli_const.csv");
    out << "y,alpha,beta,gamma\n";
    RandomSource rng(2);
    for (int i = 0; i < 30; ++i) out << rng.normal() << ',' << rng.normal() << ",3," << rng.normal() << '\n';
  }
  std::ostringstream log;
  CHECK_THROWS_WITH_AS(fit_csv("cli_const.csv", {}, "cli_const.json", log),
                       doctest::Contains("'beta'"), DegenerateColumn);
}

TEST_CASE("selftest passes on the shipped build") {
  for (const auto& r : run_selftest(5, 3)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("binary: exit codes") {
  CHECK(run_cli("--mode selftest --seed 2 --config " FSCRE_TEST_DATA_DIR "/selftest.json") == 0);
  CHECK(run_cli("--mode nonsense") == 1);
  CHECK(run_cli("--config does_not_exist.json") == 1);
  {
    std::ofstream out("cli_broken.json");
    out << "{\"sim\": {\"n\": 3,}}";
  }
  CHECK(run_cli("--config cli_broken.json") == 1);
  CHECK(slurp("cli_stderr.txt").find("line 1") != std::string::npos);
  CHECK(run_cli("predict-csv --model missing.json --x " + kFixture + " --out p.csv") == 2);
  CHECK(run_cli("fit-csv --data " + kFixture + " --model cli_bin_model.json") == 0);
  CHECK(run_cli("predict-csv --model cli_bin_model.json --x " + kFixture + " --out cli_bin_pred.csv") == 0);
  CHECK(lines(slurp("cli_bin_pred.csv")).size() == 51);
  CHECK(run_cli("simulate --config " FSCRE_TEST_DATA_DIR "/selftest.json --data cli_sim.csv --mask cli_mask.csv") == 0);
  CHECK(lines(slurp("cli_mask.csv")).size() == lines(slurp("cli_sim.csv")).size());
}
