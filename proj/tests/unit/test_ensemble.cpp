#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "fscre/ensemble.hpp"
#include "fscre/errors.hpp"
#include "fscre/oracles/oracles.hpp"
#include "fscre/oracles/properties.hpp"
#include "helpers.hpp"

using namespace fscre;

namespace {

ImputationResult random_imputation(std::uint64_t seed, std::size_t n, std::size_t p) {
  RandomSource rng(seed);
  return passthrough_imputation(test::random_matrix(rng, n, p + 1));
}

PipelineConfig default_pipeline() { return {}; }

}  // namespace

TEST_CASE("fold_assignment: sizes and determinism") {
  RandomSource a(1), b(1);
  const FoldAssignment f = fold_assignment(10, 5, a);
  std::vector<std::size_t> sizes(5, 0);
  for (auto l : f.labels) ++sizes[l];
  for (auto s : sizes) CHECK(s == 2);
  CHECK(fold_assignment(10, 5, b).labels == f.labels);

  RandomSource c(2);
  const FoldAssignment loo = fold_assignment(10, 10, c);
  CHECK(std::set<std::size_t>(loo.labels.begin(), loo.labels.end()).size() == 10);
  CHECK(loo.min_training_size() == 9);
}

TEST_CASE("cv_error: empty subset is the out-of-fold error of training means") {
  const ImputationResult imp = random_imputation(3, 20, 2);
  RandomSource rng(3);
  const FoldAssignment f = fold_assignment(20, 4, rng);
  const Vector y = imp.y();
  double sse = 0.0;
  for (std::size_t fold = 0; fold < 4; ++fold) {
    double m = 0.0, k = 0.0;
    for (std::size_t i = 0; i < 20; ++i)
      if (f.labels[i] != fold) m += y[i], k += 1.0;
    m /= k;
    for (std::size_t i = 0; i < 20; ++i)
      if (f.labels[i] == fold) sse += (y[i] - m) * (y[i] - m);
  }
  CHECK(cv_error(imp, {}, f, true) == doctest::Approx(sse / 20.0).epsilon(1e-14));
  // Without an explicit intercept the fold is centered, which is the same model.
  CHECK(cv_error(imp, {}, f, false) == doctest::Approx(sse / 20.0).epsilon(1e-14));
}

TEST_CASE("cv_error: perfect linear fit") {
  RandomSource rng(4);
  Matrix z = test::random_matrix(rng, 30, 5);
  for (std::size_t i = 0; i < 30; ++i) z(i, 0) = 2.0 * z(i, 4) - 1.0;  // y linear in x column 3
  const ImputationResult imp = passthrough_imputation(z);
  RandomSource frng(4);
  const FoldAssignment f = fold_assignment(30, 5, frng);
  const IndexList s{3};
  CHECK(cv_error(imp, s, f, true) <= 1e-16 * 100);
}

TEST_CASE("cv_error matches the fold-by-fold normal-equations oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ImputationResult imp = random_imputation(seed, 30, 4);
    RandomSource rng(seed);
    const FoldAssignment f = fold_assignment(30, 5, rng);
    const IndexList s{1, 2};
    const double ref = oracles::fold_cv_error(imp.y(), imp.x(), s, f.labels, f.folds);
    for (bool intercept : {true, false}) CHECK(std::abs(cv_error(imp, s, f, intercept) - ref) <= 1e-10);
  }
}

TEST_CASE("cv_error: collinear subsets are rank deficient") {
  RandomSource rng(5);
  Matrix z = test::random_matrix(rng, 30, 4);
  for (std::size_t i = 0; i < 30; ++i) z(i, 3) = 2.0 * z(i, 2);
  const ImputationResult imp = passthrough_imputation(z);
  RandomSource frng(5);
  const FoldAssignment f = fold_assignment(30, 5, frng);
  const IndexList s{1, 2};
  CHECK_THROWS_AS(cv_error(imp, s, f, true), RankDeficient);
}

TEST_CASE("run_selection: a dominant predictor wins the first round") {
  RandomSource rng(6);
  const std::size_t n = 60;
  Matrix z(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < 4; ++j) z(i, j) = rng.normal();
    z(i, 0) = 3.0 * z(i, 1) + 0.3 * rng.normal();
  }
  const ImputationResult imp = passthrough_imputation(z);
  const CorrelationStructure cs = correlation_structure(imp);
  CHECK(std::abs(cs.r_y[0]) > 0.9);
  FscreConfig cfg;
  cfg.models = 2;
  const SelectionResult r = run_selection(cs, imp, cfg);
  REQUIRE(!r.trace.empty());
  const auto& first = r.trace.front();
  REQUIRE(first.proposals.size() == 2);
  CHECK(first.proposals[0].candidate == 0);
  CHECK(first.proposals[1].candidate == 0);
  REQUIRE(first.winner);
  const std::size_t k = first.proposals[*first.winner].model;
  CHECK(r.sets[k].front() == 0);
  CHECK(std::count(r.sets[1 - k].begin(), r.sets[1 - k].end(), Index{0}) == 0);
}

TEST_CASE("run_selection: infinite tau selects nothing") {
  const ImputationResult imp = random_imputation(7, 40, 10);
  FscreConfig cfg;
  cfg.tau = std::numeric_limits<double>::infinity();
  const SelectionResult r = run_selection(correlation_structure(imp), imp, cfg);
  CHECK(r.selected_union().empty());
  CHECK(r.stop_reason == StopReason::BelowTolerance);
}

TEST_CASE("run_selection: unconditional arbitration with K=1 follows the LARS oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = oracles::check_lars_equivalence(seed, 60, 25, 20);
    CHECK(r.order_matches);
    CHECK(r.accepted_steps == 20);
  }
}

TEST_CASE("run_selection: disjoint sets, monotone pool and sound CV cache") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset d = oracles::generic_dataset(seed, 50, 80, true);
    PipelineConfig pc = default_pipeline();
    pc.fscre.seed = seed;
    const auto run = oracles::run_foundation_and_selection(d.y, d.x, pc);
    const SelectionResult& r = run.selection;

    RandomSource frng = RandomSource(seed).child(0);
    const FoldAssignment folds = fold_assignment(50, pc.fscre.cv_folds, frng);

    std::vector<IndexList> sets(pc.fscre.models);
    std::set<Index> taken;
    std::size_t pool = 80;
    for (const auto& rec : r.trace) {
      if (!rec.winner) continue;
      const auto& w = rec.proposals[*rec.winner];
      CHECK(taken.insert(w.candidate).second);
      --pool;
      CHECK(80 - taken.size() == pool);
      // Benefit recomputed from scratch reproduces the cached one bit for bit.
      IndexList grown = sets[w.model];
      grown.push_back(w.candidate);
      const double fresh = cv_error(run.imputation, sets[w.model], folds, true) -
                           cv_error(run.imputation, grown, folds, true);
      CHECK(fresh == w.benefit);
      sets[w.model] = grown;
    }
    CHECK(sets == r.sets);
    CHECK(r.selected_union().size() == taken.size());
    CHECK(r.selected_union().size() <= pc.fscre.resolved_max_vars(50, 80));
  }
}

TEST_CASE("run_selection: same seed, same trace") {
  const Dataset d = oracles::generic_dataset(9, 50, 60, true);
  const auto a = oracles::run_foundation_and_selection(d.y, d.x, {});
  const auto b = oracles::run_foundation_and_selection(d.y, d.x, {});
  CHECK(a.selection.sets == b.selection.sets);
  REQUIRE(a.selection.trace.size() == b.selection.trace.size());
  for (std::size_t t = 0; t < a.selection.trace.size(); ++t)
    CHECK(a.selection.trace[t].winner == b.selection.trace[t].winner);
}

TEST_CASE("invariance properties on a handful of seeds") {
  const PipelineConfig pc;
  for (std::uint64_t seed = 101; seed <= 103; ++seed) {
    auto a = oracles::check_affine_invariance(seed, 50, 80, pc);
    INFO(a.detail);
    CHECK(a.passed);
    auto p = oracles::check_permutation_equivariance(seed, 50, 80, pc);
    INFO(p.detail);
    CHECK(p.passed);
    auto i = oracles::check_intercept_invariance(seed, 50, 80, pc);
    INFO(i.detail);
    CHECK(i.passed);
    auto s = oracles::check_local_stability(seed, 50, 80, pc);
    INFO(s.detail);
    CHECK(s.passed);
  }
}

TEST_CASE("trace CSV export") {
  const Dataset d = oracles::generic_dataset(10, 50, 40, true);
  const auto run = oracles::run_foundation_and_selection(d.y, d.x, {});
  write_trace_csv("ensemble_trace.csv", run.selection);
  std::ifstream in("ensemble_trace.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "iteration,model,candidate,gamma,benefit,winner,stop_reason");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines >= run.selection.trace.size());
}

TEST_CASE("FscreConfig validation and k_max") {
  FscreConfig cfg;
  CHECK(cfg.resolved_max_vars(50, 500) == 45);
  CHECK(cfg.resolved_max_vars(50, 20) == 20);
  cfg.models = 0;
  CHECK_THROWS_AS(cfg.validate(50, 100), InvalidConfig);
  cfg = {};
  cfg.cv_folds = 1;
  CHECK_THROWS_AS(cfg.validate(50, 100), InvalidConfig);
  cfg = {};
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(50, 100), InvalidConfig);
}
