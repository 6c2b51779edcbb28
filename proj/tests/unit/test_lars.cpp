#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fscre/errors.hpp"
#include "fscre/foundation.hpp"
#include "fscre/lars.hpp"
#include "fscre/oracles/oracles.hpp"
#include "fscre/oracles/properties.hpp"
#include "fscre/simgen.hpp"
#include "helpers.hpp"

using namespace fscre;

namespace {

SubModelState state_with(IndexList active, std::vector<int> signs, Vector corr, double level) {
  SubModelState s;
  s.active = std::move(active);
  s.signs = std::move(signs);
  s.corr_state = std::move(corr);
  s.active_level = level;
  return s;
}

CorrelationStructure clean_structure(std::uint64_t seed, std::size_t n, std::size_t p) {
  SimConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.sparsity = std::min<std::size_t>(6, p);
  cfg.block_size = 3;
  cfg.rho_within = 0.5;
  cfg.rho_background = 0.1;
  cfg.seed = seed;
  const Dataset d = generate_clean(cfg);
  return correlation_structure(d.y, d.x);
}

IndexList remove(IndexList pool, Index j) {
  pool.erase(std::find(pool.begin(), pool.end(), j));
  return pool;
}

}  // namespace

TEST_CASE("equiangular_geometry: single predictor") {
  const Matrix r = Matrix::from_rows({{1, 0.3}, {0.3, 1}});
  const auto g = equiangular_geometry(r, state_with({1}, {-1}, {0.1, -0.7}, 0.7));
  CHECK(g.a_k == doctest::Approx(1.0));
  REQUIRE(g.w.size() == 1);
  CHECK(g.w[0] == doctest::Approx(1.0));
}

TEST_CASE("equiangular_geometry: two predictors, closed-form 2x2 inverse") {
  const Matrix r = Matrix::from_rows({{1, 0.5}, {0.5, 1}});
  const auto g = equiangular_geometry(r, state_with({0, 1}, {1, 1}, {0.4, 0.4}, 0.4));
  CHECK(g.a_k == doctest::Approx(std::sqrt(1.5 / 2.0)).epsilon(1e-12));
  CHECK(g.a_k == doctest::Approx(0.8660).epsilon(1e-4));
  CHECK(g.w[0] == doctest::Approx(0.57735).epsilon(1e-4));
  CHECK(g.w[1] == doctest::Approx(0.57735).epsilon(1e-4));

  // Sign conjugation: (+,-) with R12 = 0.5 equals (+,+) with R12 = -0.5.
  const Matrix rn = Matrix::from_rows({{1, -0.5}, {-0.5, 1}});
  const auto a = equiangular_geometry(r, state_with({0, 1}, {1, -1}, {0.4, -0.4}, 0.4));
  const auto b = equiangular_geometry(rn, state_with({0, 1}, {1, 1}, {0.4, 0.4}, 0.4));
  CHECK(a.a_k == doctest::Approx(b.a_k).epsilon(1e-14));
  CHECK(test::max_abs_diff(a.w, b.w) <= 1e-14);
}

TEST_CASE("equiangular_geometry: collinear active set") {
  const Matrix r = Matrix::from_rows({{1, 1}, {1, 1}});
  CHECK_THROWS_AS(equiangular_geometry(r, state_with({0, 1}, {1, 1}, {0.4, 0.4}, 0.4)),
                  NotPositiveDefinite);
}

TEST_CASE("equiangular_geometry: a_k lies in (0, 1] for random active sets") {
  RandomSource rng(3);
  for (int t = 0; t < 50; ++t) {
    const CorrelationStructure cs = clean_structure(100 + t, 40, 12);
    const std::size_t s = 1 + rng.index(6);
    const IndexList active = rng.sample_without_replacement(12, s);
    std::vector<int> signs(s);
    for (int& v : signs) v = rng.bernoulli(0.5) ? 1 : -1;
    const auto g = equiangular_geometry(cs.r_x, state_with(active, signs, Vector(12, 0.0), 0.3));
    CHECK(g.a_k > 0.0);
    CHECK(g.a_k <= 1.0 + 1e-12);
  }
}

TEST_CASE("propose: empty active set picks the largest absolute correlation") {
  const Matrix r = Matrix::from_rows({{1, 0.2, 0.1}, {0.2, 1, 0.3}, {0.1, 0.3, 1}});
  const Vector ry{0.9, -0.5, 0.3};
  const IndexList avail{0, 1, 2};
  const LarsProposal p = propose(r, SubModelState::initial(ry), avail);
  REQUIRE(p.candidate);
  CHECK(*p.candidate == 0);
  CHECK(p.step == doctest::Approx(0.9));
  CHECK(p.entry_sign == 1);
  CHECK(p.inner[1] == doctest::Approx(0.2));
  CHECK(p.inner[2] == doctest::Approx(0.1));
}

TEST_CASE("propose: non-positive denominators and steps give no candidate") {
  // a_1 = 1 makes gamma+ infinite; r_1 = -r_A makes gamma- zero.
  const Matrix r = Matrix::from_rows({{1, 1}, {1, 1}});
  const auto s = state_with({0}, {1}, {0.5, -0.5}, 0.5);
  const IndexList avail{1};
  const LarsProposal p = propose(r, s, avail);
  CHECK_FALSE(p.candidate);
  CHECK(std::isinf(p.step));
}

TEST_CASE("propose: second step matches the two-variable closed form") {
  // Standardized two-predictor LARS: after x1 enters at r1, x2 joins at
  // gamma = (r1 - r2) / (1 - rho).
  const double rho = 0.3, r1 = 0.8, r2 = 0.5;
  const Matrix r = Matrix::from_rows({{1, rho}, {rho, 1}});
  const auto s = state_with({0}, {1}, {r1, r2}, r1);
  const IndexList avail{1};
  const LarsProposal p = propose(r, s, avail);
  REQUIRE(p.candidate);
  CHECK(*p.candidate == 1);
  CHECK(p.step == doctest::Approx((r1 - r2) / (1 - rho)).epsilon(1e-12));
  CHECK(p.entry_sign == 1);
}

TEST_CASE("propose: matches the classical oracle's second entry on two-predictor data") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig cfg;
    cfg.n = 40;
    cfg.p = 2;
    cfg.sparsity = 2;
    cfg.block_size = 2;
    cfg.rho_within = 0.4;
    cfg.rho_background = 0.0;
    cfg.seed = seed;
    const Dataset d = generate_clean(cfg);
    const auto oracle = oracles::classical_lars_path(d.x, d.y, 2);
    const CorrelationStructure cs = correlation_structure(d.y, d.x);
    IndexList pool{0, 1};
    SubModelState st = SubModelState::initial(cs.r_y);
    LarsProposal first = propose(cs.r_x, st, pool);
    st = apply_step(st, first, pool);
    pool = remove(pool, *first.candidate);
    const LarsProposal second = propose(cs.r_x, st, pool);
    REQUIRE(second.candidate);
    CHECK(*second.candidate == oracle.entry_order[1]);
    CHECK(std::abs(second.step - oracle.step_sizes[1]) <= 1e-8);
  }
}

TEST_CASE("apply_step: first entry fixes the active level and leaves correlations") {
  const Matrix r = Matrix::from_rows({{1, 0.5}, {0.5, 1}});
  const Vector ry{0.9, 0.45};
  const IndexList avail{0, 1};
  const SubModelState s0 = SubModelState::initial(ry);
  const LarsProposal p = propose(r, s0, avail);
  const SubModelState s1 = apply_step(s0, p, avail);
  CHECK(s1.active == IndexList{0});
  CHECK(s1.signs == std::vector<int>{1});
  CHECK(s1.active_level == doctest::Approx(0.9));
  CHECK(s1.corr_state[0] == doctest::Approx(0.9));
  CHECK(s1.corr_state[1] == doctest::Approx(0.45));
}

TEST_CASE("apply_step: zero step only appends the candidate") {
  const Matrix r = Matrix::from_rows({{1, 0.2, 0.1}, {0.2, 1, 0.4}, {0.1, 0.4, 1}});
  const auto s = state_with({0}, {1}, {0.5, 0.5, 0.1}, 0.5);
  const IndexList avail{1, 2};
  LarsProposal p = propose(r, s, avail);
  p.candidate = 1;
  p.step = 0.0;
  p.entry_sign = 1;
  const SubModelState t = apply_step(s, p, avail);
  CHECK(t.active == IndexList{0, 1});
  CHECK(t.corr_state == s.corr_state);
  CHECK(t.active_level == s.active_level);
}

TEST_CASE("apply_step: equi-correlation along random 10-predictor paths") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CorrelationStructure cs = clean_structure(seed, 30, 10);
    IndexList pool(10);
    std::iota(pool.begin(), pool.end(), Index{0});
    SubModelState st = SubModelState::initial(cs.r_y);
    for (int step = 0; step < 5; ++step) {
      const LarsProposal p = propose(cs.r_x, st, pool);
      REQUIRE(p.candidate);
      st = apply_step(st, p, pool);
      pool = remove(pool, *p.candidate);
      CHECK(equi_correlation_gap(st) <= 1e-8);
      for (Index j : pool) CHECK(std::abs(st.corr_state[j]) <= st.active_level + 1e-8);
      CHECK(st.active_level >= 0.0);
      CHECK(st.active_level <= 1.0 + 1e-8);
    }
  }
}

TEST_CASE("propose: sign flip of a column keeps candidate and step") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CorrelationStructure cs = clean_structure(seed, 40, 8);
    IndexList pool(8);
    std::iota(pool.begin(), pool.end(), Index{0});
    SubModelState st = SubModelState::initial(cs.r_y);
    for (int k = 0; k < 2; ++k) {
      const LarsProposal p = propose(cs.r_x, st, pool);
      st = apply_step(st, p, pool);
      pool = remove(pool, *p.candidate);
    }
    const LarsProposal base = propose(cs.r_x, st, pool);
    REQUIRE(base.candidate);
    for (Index j = 0; j < 8; ++j) {
      Matrix r = cs.r_x;
      for (Index l = 0; l < 8; ++l) {
        if (l == j) continue;
        r(j, l) = -r(j, l);
        r(l, j) = -r(l, j);
      }
      SubModelState flipped = st;
      flipped.corr_state[j] = -flipped.corr_state[j];
      for (std::size_t a = 0; a < flipped.active.size(); ++a)
        if (flipped.active[a] == j) flipped.signs[a] = -flipped.signs[a];
      const LarsProposal q = propose(r, flipped, pool);
      REQUIRE(q.candidate);
      CHECK(*q.candidate == *base.candidate);
      CHECK(std::abs(q.step - base.step) <= 1e-12);
      CHECK(q.entry_sign == (j == *base.candidate ? -base.entry_sign : base.entry_sign));
    }
  }
}

TEST_CASE("path equivalence with the classical oracle (n in {30,60}, p in {10,25})") {
  std::size_t instances = 0;
  for (std::size_t n : {30u, 60u}) {
    for (std::size_t p : {10u, 25u}) {
      // The CV size cap (|S| + 2 below the smallest training fold) binds
      // before n - 2 at n = 30.
      const std::size_t steps = std::min(n - 8, p);
      for (std::uint64_t seed = 1; seed <= 13; ++seed, ++instances) {
        const auto r = oracles::check_lars_equivalence(seed * 31 + n + p, n, p, steps);
        INFO("n=" << n << " p=" << p << " seed=" << seed);
        CHECK(r.order_matches);
        CHECK(r.max_step_error <= 1e-8);
        CHECK(r.max_equi_gap <= 1e-8);
      }
    }
  }
  CHECK(instances >= 50);
}
