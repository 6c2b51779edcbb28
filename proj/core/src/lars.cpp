#include "fscre/lars.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fscre/errors.hpp"
#include "fscre/linalg.hpp"

namespace fscre {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

double inner_with_direction(const Matrix& r_x, const SubModelState& state,
                            const EquiangularGeometry& geo, Index j) {
  double s = 0.0;
  for (std::size_t k = 0; k < state.active.size(); ++k)
    s += state.signs[k] * r_x(j, state.active[k]) * geo.w[k];
  return s;
}

}  // namespace

SubModelState SubModelState::initial(std::span<const double> r_y) {
  SubModelState s;
  s.corr_state.assign(r_y.begin(), r_y.end());
  return s;
}

EquiangularGeometry equiangular_geometry(const Matrix& r_x, const SubModelState& state) {
  const std::size_t s = state.active.size();
  if (s == 0) throw InvalidConfig("equiangular_geometry: empty active set");
  Matrix g(s, s);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b)
      g(a, b) = state.signs[a] * state.signs[b] * r_x(state.active[a], state.active[b]);
  const Vector x = solve_spd(g, Vector(s, 1.0));
  double total = 0.0;
  for (double v : x) total += v;
  if (!(total > 0.0)) throw NotPositiveDefinite("equiangular_geometry: 1' G^-1 1 is not positive");
  EquiangularGeometry geo;
  geo.a_k = 1.0 / std::sqrt(total);
  geo.w.resize(s);
  for (std::size_t k = 0; k < s; ++k) geo.w[k] = geo.a_k * x[k];
  return geo;
}

LarsProposal propose(const Matrix& r_x, const SubModelState& state,
                     std::span<const Index> available) {
  const std::size_t p = r_x.rows();
  LarsProposal prop;
  prop.inner.assign(p, std::numeric_limits<double>::quiet_NaN());
  const Vector& r = state.corr_state;

  if (state.active.empty()) {
    double best = 0.0;
    for (Index j : available) {
      if (std::abs(r[j]) > best) {
        best = std::abs(r[j]);
        prop.candidate = j;
      }
    }
    if (!prop.candidate) return prop;
    const Index star = *prop.candidate;
    const int sgn = sign_of(r[star]);
    prop.step = best;
    prop.entry_sign = sgn;
    prop.a_k = 1.0;
    for (Index j : available) prop.inner[j] = sgn * r_x(j, star);
    return prop;
  }

  const EquiangularGeometry geo = equiangular_geometry(r_x, state);
  prop.a_k = geo.a_k;
  const double r_a = state.active_level;
  for (Index j : state.active) prop.inner[j] = inner_with_direction(r_x, state, geo, j);

  for (Index j : available) {
    const double a_j = inner_with_direction(r_x, state, geo, j);
    prop.inner[j] = a_j;
    const double den_plus = geo.a_k - a_j;
    const double den_minus = geo.a_k + a_j;
    double g_plus = den_plus > 0.0 ? (r_a - r[j]) / den_plus : kInf;
    double g_minus = den_minus > 0.0 ? (r_a + r[j]) / den_minus : kInf;
    if (!(g_plus > 0.0)) g_plus = kInf;
    if (!(g_minus > 0.0)) g_minus = kInf;
    const double g = std::min(g_plus, g_minus);
    if (g < prop.step) {
      prop.step = g;
      prop.candidate = j;
    }
  }
  if (prop.candidate) {
    const Index star = *prop.candidate;
    const double post = r[star] - prop.step * prop.inner[star];
    prop.entry_sign = std::abs(post) < 1e-12 ? 1 : sign_of(post);
  }
  return prop;
}

SubModelState apply_step(const SubModelState& state, const LarsProposal& prop,
                         std::span<const Index> available) {
  if (!prop.candidate) throw InvariantViolation("apply_step: proposal has no candidate");
  const Index star = *prop.candidate;
  if (std::find(available.begin(), available.end(), star) == available.end())
    throw InvariantViolation("apply_step: candidate " + std::to_string(star) +
                             " is not available");

  SubModelState next = state;
  if (state.active.empty()) {
    next.active_level = prop.step;
  } else {
    const double g = prop.step;
    for (Index j : available) next.corr_state[j] -= g * prop.inner[j];
    for (Index j : state.active) next.corr_state[j] -= g * prop.inner[j];
    next.active_level -= g * prop.a_k;
  }
  next.active.push_back(star);
  next.signs.push_back(prop.entry_sign);

  const double gap = equi_correlation_gap(next);
  if (gap > kEquiCorrelationTolerance || next.active_level < -kEquiCorrelationTolerance ||
      next.active_level > 1.0 + kEquiCorrelationTolerance) {
    throw InvariantViolation("apply_step: equi-correlation broken (gap " + std::to_string(gap) +
                             ", level " + std::to_string(next.active_level) + ")");
  }
  return next;
}

double equi_correlation_gap(const SubModelState& state) {
  double gap = 0.0;
  for (Index j : state.active)
    gap = std::max(gap, std::abs(std::abs(state.corr_state[j]) - state.active_level));
  return gap;
}

}  // namespace fscre
