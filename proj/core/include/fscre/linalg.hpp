#pragma once

#include <span>

#include "fscre/matrix.hpp"

namespace fscre {

// A pivot (Cholesky) or squared R diagonal (QR) counts as zero when it falls
// below this fraction of the largest diagonal magnitude.
inline constexpr double kRankTolerance = 1e-10;

// Lower-triangular Cholesky factor L with A = L L^T.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a);  // throws NotPositiveDefinite

  Vector solve(std::span<const double> b) const;
  const Matrix& lower() const noexcept { return lower_; }

 private:
  Matrix lower_;
};

Vector solve_spd(const Matrix& a, std::span<const double> b);

// Square system via LU with partial pivoting. Throws RankDeficient on a
// (numerically) singular matrix.
Vector solve_linear(const Matrix& a, std::span<const double> b);

struct OlsFit {
  Vector coefficients;
  double intercept = 0.0;
};

// Least squares via Householder QR. Throws RankDeficient when the design is
// singular within kRankTolerance, and ShapeMismatch on inconsistent sizes or
// when there are not more rows than parameters.
OlsFit ols_fit(const Matrix& x, std::span<const double> y, bool intercept);

// Solves min ||x b - y|| for a full-column-rank x (no intercept handling).
Vector least_squares(const Matrix& x, std::span<const double> y);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column i pairs with values[i]
};

SymmetricEigen symmetric_eigen(const Matrix& a);

}  // namespace fscre
