#pragma once

#include <limits>
#include <optional>

#include "fscre/matrix.hpp"

namespace fscre {

// Equi-correlation tolerance enforced after every accepted step.
inline constexpr double kEquiCorrelationTolerance = 1e-8;

// One sub-model's position on its LARS path, expressed in correlation space.
struct SubModelState {
  IndexList active;       // entry order
  std::vector<int> signs; // +1 / -1, aligned with `active`
  Vector corr_state;      // current correlation of every predictor with the residual
  double active_level = 0.0;

  static SubModelState initial(std::span<const double> r_y);
};

struct EquiangularGeometry {
  double a_k = 1.0;
  Vector w;  // aligned with the active list
};

struct LarsProposal {
  std::optional<Index> candidate;
  double step = std::numeric_limits<double>::infinity();
  // a_j for every available and every active j; NaN elsewhere.
  Vector inner;
  double a_k = 1.0;
  int entry_sign = 1;
};

// Throws NotPositiveDefinite when the signed active correlation submatrix is
// singular (exactly collinear active predictors).
EquiangularGeometry equiangular_geometry(const Matrix& r_x, const SubModelState& state);

// Next predictor to join `state`'s path from `available` (ascending, disjoint
// from every active set) together with its step size.
LarsProposal propose(const Matrix& r_x, const SubModelState& state,
                     std::span<const Index> available);

// Moves `state` by prop.step along its equiangular direction and appends the
// candidate. The first entry of an empty model only records the entry level;
// no movement happens before a direction exists. Throws InvariantViolation when
// the active correlations drift apart by more than kEquiCorrelationTolerance.
SubModelState apply_step(const SubModelState& state, const LarsProposal& prop,
                         std::span<const Index> available);

// Largest violation of | |corr_state_j| - active_level | over the active set.
double equi_correlation_gap(const SubModelState& state);

}  // namespace fscre
