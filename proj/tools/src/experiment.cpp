#include "fscre/tools/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "fscre/errors.hpp"
#include "fscre/oracles/properties.hpp"

namespace fscre::tools {

EvalReport run_replicate(const Replicate& r, std::uint64_t seed) {
  SimConfig sim = r.sim;
  sim.seed = seed;
  const Dataset clean = generate_clean(sim);
  RandomSource rng = RandomSource(seed).child(5);
  const Dataset train = contaminate(clean, r.contamination, block_covariance(sim), rng);
  const Dataset test = make_test_set(sim, r.test_size, *clean.truth);

  PipelineConfig pc = r.pipeline;
  pc.fscre.seed = mix_seed(seed, 6);
  auto [fit, seconds] = timed([&] { return fit_fscre(train.y, train.x, pc); });

  EvalReport report;
  const Vector y_hat = predict(fit.model, test.x);
  const double sd = clean.truth->noise_sd;
  report.mspe = mspe(test.y, y_hat, sd * sd);
  const IndexList selected = fit.selection.selected_union();
  const SelectionScores scores = selection_scores(clean.truth->active_set, selected);
  report.recall = scores.recall;
  report.precision = scores.precision;
  report.selected_count = selected.size();
  report.cpu_seconds = seconds;
  return report;
}

std::string results_header() {
  return "schema_version,mode,scenario,n,p,sparsity,snr,alpha,K,tau,rep,seed,mspe,recall,"
         "precision,selected_count,cpu_seconds";
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Job {
  Replicate replicate;
  ResultRow row;
};

std::vector<Job> build_jobs(const ExperimentConfig& cfg) {
  Replicate base;
  base.sim = cfg.sim;
  base.contamination = cfg.contamination;
  base.pipeline.fscre = cfg.fscre;
  base.pipeline.impute = cfg.impute;
  base.test_size = cfg.test_size;

  std::vector<Replicate> cells;
  switch (cfg.mode) {
    case Mode::Fit: cells.push_back(base); break;
    case Mode::SweepK:
      for (std::size_t k : cfg.sweep_k) {
        Replicate r = base;
        r.pipeline.fscre.models = k;
        cells.push_back(r);
      }
      break;
    case Mode::SweepContamination:
      for (const auto& c : cfg.sweep_contamination) {
        Replicate r = base;
        r.contamination = c;
        cells.push_back(r);
      }
      break;
    case Mode::Benchmark:
      for (std::size_t n : cfg.bench_n) {
        for (std::size_t p : cfg.bench_p) {
          Replicate r = base;
          r.sim.n = n;
          r.sim.p = p;
          r.sim.sparsity = std::min(r.sim.sparsity, p);
          cells.push_back(r);
        }
      }
      break;
    case Mode::Selftest: break;
  }

  std::vector<Job> jobs;
  for (const Replicate& cell : cells) {
    cell.sim.validate();
    cell.contamination.validate();
    cell.pipeline.fscre.validate(cell.sim.n, cell.sim.p);
    for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
      Job job{cell, {}};
      // Replication seeds depend on the replication only, so grid cells are
      // paired on identical training data.
      job.row.seed = mix_seed(cfg.seed, rep);
      job.row.mode = cfg.mode;
      job.row.scenario = cell.contamination.scenario;
      job.row.sim = cell.sim;
      job.row.alpha = cell.contamination.alpha;
      job.row.models = cell.pipeline.fscre.models;
      job.row.tau = cell.pipeline.fscre.tau;
      job.row.rep = rep;
      jobs.push_back(std::move(job));
    }
  }
  return jobs;
}

}  // namespace

std::string format_row(const ResultRow& row) {
  std::string s = std::to_string(kSchemaVersion);
  auto add = [&s](const std::string& v) { s += ',' + v; };
  add(to_string(row.mode));
  add(to_string(row.scenario));
  add(std::to_string(row.sim.n));
  add(std::to_string(row.sim.p));
  add(std::to_string(row.sim.sparsity));
  add(num(row.sim.snr));
  add(num(row.alpha));
  add(std::to_string(row.models));
  add(num(row.tau));
  add(std::to_string(row.rep));
  add(std::to_string(row.seed));
  add(num(row.report.mspe));
  add(num(row.report.recall));
  add(row.report.precision ? num(*row.report.precision) : "");
  add(std::to_string(row.report.selected_count));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", row.report.cpu_seconds);
  add(buf);
  return s;
}

std::vector<ResultRow> run_jobs(const ExperimentConfig& cfg) {
  std::vector<Job> jobs = build_jobs(cfg);
  std::vector<ResultRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        rows[i] = jobs[i].row;
        rows[i].report = run_replicate(jobs[i].replicate, jobs[i].row.seed);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

std::vector<BenchmarkCell> summarize_benchmark(const std::vector<ResultRow>& rows) {
  std::vector<BenchmarkCell> cells;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> times;
  for (const auto& r : rows) {
    auto key = std::pair{r.sim.n, r.sim.p};
    if (!times.count(key)) cells.push_back({r.sim.n, r.sim.p, 0, 0.0});
    times[key].push_back(r.report.cpu_seconds);
  }
  for (auto& c : cells) {
    const auto& t = times[{c.n, c.p}];
    c.reps = t.size();
    c.median_seconds = median_of(t);
  }
  return cells;
}

void write_results(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
  std::ofstream out(cfg.output_path);
  if (!out) throw Error("cannot write " + cfg.output_path);
  out << "# config " << config_json(cfg) << '\n' << results_header() << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
  if (!out) throw Error("write failed: " + cfg.output_path);

  if (cfg.mode == Mode::Benchmark) {
    const std::string path = cfg.output_path + ".summary.csv";
    std::ofstream sum(path);
    if (!sum) throw Error("cannot write " + path);
    sum << "n,p,reps,median_cpu_seconds\n";
    for (const auto& c : summarize_benchmark(rows)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", c.median_seconds);
      sum << c.n << ',' << c.p << ',' << c.reps << ',' << buf << '\n';
    }
  }
}

std::vector<SelftestOutcome> run_selftest(std::uint64_t seed, std::size_t instances) {
  using namespace fscre::oracles;
  std::vector<SelftestOutcome> out;
  PipelineConfig pc;
  pc.fscre.seed = seed;

  auto tally = [&](const std::string& name, auto check) {
    std::size_t ok = 0;
    std::string first_failure;
    for (std::size_t i = 0; i < instances; ++i) {
      const PropertyResult r = check(mix_seed(seed, i));
      ok += r.passed;
      if (!r.passed && first_failure.empty())
        first_failure = "instance " + std::to_string(i) + ": " + r.detail;
    }
    out.push_back({name, ok == instances,
                   std::to_string(ok) + "/" + std::to_string(instances) + " instances" +
                       (first_failure.empty() ? "" : "; " + first_failure)});
  };

  tally("lars-equivalence", [](std::uint64_t s) {
    const LarsEquivalence r = check_lars_equivalence(s, 60, 25, 20);
    return PropertyResult{r.passed(1e-8), "order " + std::string(r.order_matches ? "ok" : "differs") +
                                              ", step error " + std::to_string(r.max_step_error) +
                                              ", equi gap " + std::to_string(r.max_equi_gap)};
  });
  tally("affine-invariance", [&](std::uint64_t s) { return check_affine_invariance(s, 50, 80, pc); });
  tally("permutation-equivariance",
        [&](std::uint64_t s) { return check_permutation_equivariance(s, 50, 80, pc); });
  tally("intercept-invariance",
        [&](std::uint64_t s) { return check_intercept_invariance(s, 50, 80, pc); });
  tally("local-stability", [&](std::uint64_t s) { return check_local_stability(s, 50, 80, pc); });
  tally("ddc-equivariance", [](std::uint64_t s) { return check_ddc_equivariance(s, 50, 40); });
  return out;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.mode == Mode::Selftest) {
    bool all = true;
    for (const auto& r : run_selftest(cfg.seed, std::min<std::size_t>(cfg.replications, 10))) {
      log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      all = all && r.passed;
    }
    return all ? 0 : 3;
  }
  const std::vector<ResultRow> rows = run_jobs(cfg);
  write_results(cfg, rows);
  log << "wrote " << rows.size() << " rows to " << cfg.output_path << '\n';
  if (cfg.mode == Mode::Benchmark) {
    for (const auto& c : summarize_benchmark(rows))
      log << "n=" << c.n << " p=" << c.p << " median " << c.median_seconds << " s\n";
  }
  return 0;
}

}  // namespace fscre::tools
