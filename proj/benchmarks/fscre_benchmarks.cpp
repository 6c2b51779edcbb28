#include <benchmark/benchmark.h>

#include <numeric>

#include "fscre/foundation.hpp"
#include "fscre/lars.hpp"
#include "fscre/pipeline.hpp"
#include "fscre/simgen.hpp"

namespace {

using namespace fscre;

Dataset mixture_data(std::size_t n, std::size_t p) {
  SimConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.sparsity = std::min<std::size_t>(50, p);
  cfg.seed = 17;
  const Dataset clean = generate_clean(cfg);
  RandomSource rng(18);
  return contaminate(clean, {Scenario::MixtureCorrelation, 0.1, 0.05}, block_covariance(cfg), rng);
}

void BM_DdcImpute(benchmark::State& state) {
  const Dataset d = mixture_data(100, static_cast<std::size_t>(state.range(0)));
  const Matrix z = joint_matrix(d.y, d.x);
  for (auto _ : state) benchmark::DoNotOptimize(ddc_impute(z));
}
BENCHMARK(BM_DdcImpute)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CorrelationStructure(benchmark::State& state) {
  const Dataset d = mixture_data(100, static_cast<std::size_t>(state.range(0)));
  const ImputationResult imp = passthrough_imputation(joint_matrix(d.y, d.x));
  for (auto _ : state) benchmark::DoNotOptimize(correlation_structure(imp));
}
BENCHMARK(BM_CorrelationStructure)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

// One proposal for a sub-model that already holds `range(1)` predictors.
void BM_Propose(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Dataset d = mixture_data(100, p);
  const CorrelationStructure cs = correlation_structure(d.y, d.x);
  IndexList pool(p);
  std::iota(pool.begin(), pool.end(), Index{0});
  SubModelState st = SubModelState::initial(cs.r_y);
  for (long k = 0; k < state.range(1); ++k) {
    const LarsProposal prop = propose(cs.r_x, st, pool);
    st = apply_step(st, prop, pool);
    pool.erase(std::find(pool.begin(), pool.end(), *prop.candidate));
  }
  for (auto _ : state) benchmark::DoNotOptimize(propose(cs.r_x, st, pool));
}
BENCHMARK(BM_Propose)->Args({500, 5})->Args({2000, 5})->Args({2000, 20})->Unit(benchmark::kMicrosecond);

void BM_FitFscre(benchmark::State& state) {
  const Dataset d = mixture_data(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(1)));
  const PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit_fscre(d.y, d.x, cfg));
}
BENCHMARK(BM_FitFscre)->Args({50, 500})->Args({100, 500})->Args({100, 1000})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
