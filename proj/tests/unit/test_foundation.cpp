#include <doctest.h>

#include <cmath>

#include "fscre/errors.hpp"
#include "fscre/foundation.hpp"
#include "fscre/oracles/oracles.hpp"
#include "fscre/oracles/properties.hpp"
#include "fscre/simgen.hpp"
#include "helpers.hpp"

using namespace fscre;

namespace {

Matrix correlated_matrix(std::uint64_t seed, std::size_t n, std::size_t p) {
  SimConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.sparsity = p;
  cfg.block_size = 5;
  cfg.seed = seed;
  const Dataset d = generate_clean(cfg);
  return joint_matrix(d.y, d.x);
}

}  // namespace

TEST_CASE("robust_standardize: hand-computed median and MAD") {
  const Matrix z = Matrix::from_rows({{1}, {2}, {3}, {4}, {5}});
  const Standardized s = robust_standardize(z);
  CHECK(s.scales.location[0] == 3.0);
  CHECK(s.scales.scale[0] == doctest::Approx(1.4826));
  const double expect[] = {-1.349, -0.674, 0.0, 0.674, 1.349};
  for (std::size_t i = 0; i < 5; ++i) CHECK(s.z(i, 0) == doctest::Approx(expect[i]).epsilon(1e-3));
}

TEST_CASE("robust_standardize: affine column maps leave z-scores unchanged") {
  RandomSource rng(1);
  Matrix z = test::random_matrix(rng, 30, 1);
  Matrix t = z;
  for (double& v : t.data()) v = 2.0 * v + 7.0;
  const Standardized a = robust_standardize(z), b = robust_standardize(t);
  CHECK(test::max_abs_diff(a.z.data(), b.z.data()) <= 1e-12);
}

TEST_CASE("robust_standardize rejects constant columns with their index") {
  const Matrix z = Matrix::from_rows({{1, 4}, {2, 4}, {3, 4}, {5, 4}});
  try {
    robust_standardize(z);
    FAIL("expected DegenerateColumn");
  } catch (const DegenerateColumn& e) {
    CHECK(e.column() == 1);
  }
}

TEST_CASE("ddc_impute: null flag rate on clean Gaussian data") {
  RandomSource rng(2);
  const Matrix z = test::random_matrix(rng, 100, 20);
  const ImputationResult r = ddc_impute(z);
  CHECK(static_cast<double>(r.flagged_count()) / (100.0 * 20.0) <= 0.02);
}

TEST_CASE("ddc_impute: null flag rate on clean correlated data") {
  const Matrix z = correlated_matrix(3, 100, 20);
  const ImputationResult r = ddc_impute(z);
  CHECK(static_cast<double>(r.flagged_count()) / static_cast<double>(z.rows() * z.cols()) <= 0.02);
}

TEST_CASE("ddc_impute: an injected +10 SD cell is flagged and repaired") {
  const Matrix clean = correlated_matrix(4, 100, 20);
  const Standardized st = robust_standardize(clean);
  for (std::size_t j : {3u, 8u, 15u}) {
    Matrix z = clean;
    const std::size_t i = 17;
    z(i, j) += 10.0 * st.scales.scale[j];
    const ImputationResult r = ddc_impute(z);
    CHECK(r.flags(i, j) == 1.0);
    CHECK(std::abs(r.z_imp(i, j) - clean(i, j)) <= 2.0 * st.scales.scale[j]);
  }
}

TEST_CASE("ddc_impute: unflagged cells pass through exactly") {
  const Dataset d = oracles::generic_dataset(5, 50, 40, true);
  const Matrix z = joint_matrix(d.y, d.x);
  const ImputationResult r = ddc_impute(z);
  CHECK(r.flagged_count() > 0);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) {
      if (r.flags(i, j) == 0.0) CHECK(r.z_imp(i, j) == z(i, j));
      else CHECK(r.z_imp(i, j) != z(i, j));
      CHECK(std::isfinite(r.z_imp(i, j)));
    }
  }
}

TEST_CASE("ddc_impute: per-column affine equivariance") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = oracles::check_ddc_equivariance(seed, 50, 40);
    INFO(r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("ddc_impute: column permutation commutes with imputation") {
  const Dataset d = oracles::generic_dataset(6, 50, 30, true);
  const Matrix z = joint_matrix(d.y, d.x);
  RandomSource rng(6);
  const auto perm = rng.permutation(z.cols());
  const ImputationResult a = ddc_impute(z);
  const ImputationResult b = ddc_impute(z.select_columns(perm));
  CHECK(b.z_imp == a.z_imp.select_columns(perm));
  CHECK(b.flags == a.flags.select_columns(perm));
}

TEST_CASE("ddc_impute: error paths") {
  RandomSource rng(7);
  CHECK_THROWS_AS(ddc_impute(test::random_matrix(rng, 20, 1)), TooFewColumns);
  CHECK_THROWS_AS(ddc_impute(test::random_matrix(rng, 9, 4)), ShapeMismatch);
  Matrix z = test::random_matrix(rng, 20, 4);
  for (std::size_t i = 0; i < 20; ++i) z(i, 2) = 1.0;
  CHECK_THROWS_AS(ddc_impute(z), DegenerateColumn);
}

TEST_CASE("correlation_structure: trivial cases") {
  RandomSource rng(8);
  Matrix x = test::random_matrix(rng, 30, 3);
  x.set_column(2, x.column(0));
  const Vector y = x.column(0);
  const CorrelationStructure cs = correlation_structure(y, x);
  CHECK(cs.r_x(0, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cs.r_y[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("correlation_structure matches pairwise Pearson and is a correlation matrix") {
  RandomSource rng(9);
  const Matrix z = test::random_matrix(rng, 50, 11);
  const ImputationResult imp = passthrough_imputation(z);
  const CorrelationStructure cs = correlation_structure(imp);
  const Matrix x = imp.x();
  const Vector y = imp.y();
  for (std::size_t a = 0; a < 10; ++a) {
    CHECK(std::abs(cs.r_y[a] - oracles::pearson(x.column(a), y)) <= 1e-12);
    CHECK(cs.r_x(a, a) == 1.0);
    for (std::size_t b = 0; b < 10; ++b) {
      CHECK(std::abs(cs.r_x(a, b) - oracles::pearson(x.column(a), x.column(b))) <= 1e-12);
      CHECK(cs.r_x(a, b) == cs.r_x(b, a));
    }
  }
  CHECK(oracles::jacobi_eigen(cs.r_x).values.front() >= -1e-8);
}

TEST_CASE("correlation_structure: PSD in the p > n regime") {
  RandomSource rng(10);
  const Matrix z = test::random_matrix(rng, 20, 41);
  const CorrelationStructure cs = correlation_structure(passthrough_imputation(z));
  CHECK(oracles::jacobi_eigen(cs.r_x).values.front() >= -1e-8);
}

TEST_CASE("correlation_structure: sign rule under per-column affine maps") {
  RandomSource rng(11);
  const Matrix x = test::random_matrix(rng, 40, 6);
  const Vector y = test::random_vector(rng, 40);
  const double c[] = {2.0, -0.5, 1.0, -3.0, 0.2, 1.5};
  Matrix t = x;
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 6; ++j) t(i, j) = c[j] * x(i, j) + static_cast<double>(j);
  const CorrelationStructure a = correlation_structure(y, x), b = correlation_structure(y, t);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(std::abs(b.r_y[i] - (c[i] > 0 ? 1 : -1) * a.r_y[i]) <= 1e-12);
    for (std::size_t l = 0; l < 6; ++l)
      CHECK(std::abs(b.r_x(i, l) - (c[i] * c[l] > 0 ? 1 : -1) * a.r_x(i, l)) <= 1e-12);
  }
}

TEST_CASE("correlation_structure rejects zero-variance columns") {
  Matrix x = Matrix::from_rows({{1, 2}, {1, 3}, {1, 5}});
  CHECK_THROWS_AS(correlation_structure(Vector{1, 2, 4}, x), DegenerateColumn);
}
