#pragma once

// Brute-force reference implementations used to check the production code.
// None of these call into the fscre algorithms; they only share the Matrix
// container.

#include <cstddef>
#include <vector>

#include "fscre/matrix.hpp"

namespace fscre::oracles {

// Gaussian elimination with partial pivoting on the augmented system.
Vector gaussian_elimination(const Matrix& a, std::span<const double> b);

// Least squares through the normal equations X'X b = X'y. With `intercept`, the
// first returned entry is the intercept.
Vector normal_equations(const Matrix& x, std::span<const double> y, bool intercept);

double pearson(std::span<const double> a, std::span<const double> b);

// Fold-by-fold OLS cross-validation error: sum of squared out-of-fold
// residuals over all rows divided by n. Every fit carries a location term,
// which is what the engine computes with or without an explicit intercept.
double fold_cv_error(std::span<const double> y, const Matrix& x, std::span<const Index> subset,
                     std::span<const std::size_t> labels, std::size_t folds);

// sigma with mean(rho_bisquare(r / sigma; c0)) = 0.5 located by successive
// grid refinement.
double grid_search_s_scale(std::span<const double> residuals, double c0);

struct JacobiEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns
};
JacobiEigen jacobi_eigen(const Matrix& symmetric);

struct OraclePath {
  IndexList entry_order;
  // step_sizes[0] is the initial max |correlation|; step_sizes[k] is the
  // distance travelled along the k-th equiangular direction. Both in
  // correlation units (y scaled to unit norm).
  Vector step_sizes;
  Vector max_correlations;
};

// Classical LARS in data space with residual-correlation tracking.
OraclePath classical_lars_path(const Matrix& x, std::span<const double> y, std::size_t steps);

}  // namespace fscre::oracles
