#include "fscre/linalg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "fscre/errors.hpp"

namespace fscre {

Cholesky::Cholesky(const Matrix& a) : lower_(a.rows(), a.cols()) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ShapeMismatch("cholesky: matrix is not square");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double tol = kRankTolerance * max_diag;

  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lower_(j, k) * lower_(j, k);
    if (!(d > tol)) {
      throw NotPositiveDefinite("cholesky: non-positive pivot " + std::to_string(d) +
                                " at index " + std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    lower_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower_(i, k) * lower_(j, k);
      lower_(i, j) = s / ljj;
    }
  }
}

Vector Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = lower_.rows();
  if (b.size() != n) throw ShapeMismatch("cholesky solve: rhs length differs");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= lower_(i, k) * x[k];
    x[i] /= lower_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= lower_(k, i) * x[k];
    x[i] /= lower_(i, i);
  }
  return x;
}

Vector solve_spd(const Matrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw ShapeMismatch("solve_spd: rhs length differs");
  return Cholesky(a).solve(b);
}

Vector solve_linear(const Matrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw ShapeMismatch("solve_linear: shapes disagree");
  Matrix lu = a;
  Vector x(b.begin(), b.end());
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (!(std::abs(lu(piv, k)) > kRankTolerance * scale))
      throw RankDeficient("solve_linear: singular matrix at column " + std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      std::swap(x[k], x[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
      x[i] -= f * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = k + 1; j < n; ++j) x[k] -= lu(k, j) * x[j];
    x[k] /= lu(k, k);
  }
  return x;
}

Vector least_squares(const Matrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (y.size() != n) throw ShapeMismatch("least squares: response length differs from rows");
  if (p >= n) {
    throw ShapeMismatch("least squares: need more rows (" + std::to_string(n) +
                        ") than parameters (" + std::to_string(p) + ")");
  }
  // Column-major working copy for Householder sweeps.
  std::vector<double> a(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) a[j * n + i] = x(i, j);
  Vector rhs(y.begin(), y.end());

  double max_norm2 = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[j * n + i] * a[j * n + i];
    max_norm2 = std::max(max_norm2, s);
  }
  const double tol = kRankTolerance * max_norm2;

  Vector diag(p);
  for (std::size_t k = 0; k < p; ++k) {
    double* col = &a[k * n];
    double norm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) norm2 += col[i] * col[i];
    if (!(norm2 > tol)) {
      throw RankDeficient("least squares: design is rank deficient at column " +
                          std::to_string(k));
    }
    const double alpha = col[k] > 0 ? -std::sqrt(norm2) : std::sqrt(norm2);
    // v = col[k:] - alpha e_k, stored in place.
    col[k] -= alpha;
    const double vnorm2 = norm2 - 2.0 * alpha * (col[k] + alpha) + alpha * alpha;
    diag[k] = alpha;
    if (vnorm2 > 0.0) {
      for (std::size_t j = k + 1; j < p; ++j) {
        double* cj = &a[j * n];
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += col[i] * cj[i];
        const double f = 2.0 * s / vnorm2;
        for (std::size_t i = k; i < n; ++i) cj[i] -= f * col[i];
      }
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += col[i] * rhs[i];
      const double f = 2.0 * s / vnorm2;
      for (std::size_t i = k; i < n; ++i) rhs[i] -= f * col[i];
    }
  }
  Vector beta(p);
  for (std::size_t k = p; k-- > 0;) {
    double s = rhs[k];
    for (std::size_t j = k + 1; j < p; ++j) s -= a[j * n + k] * beta[j];
    beta[k] = s / diag[k];
  }
  return beta;
}

OlsFit ols_fit(const Matrix& x, std::span<const double> y, bool intercept) {
  if (x.rows() != y.size()) throw ShapeMismatch("ols_fit: response length differs from rows");
  if (!intercept) return {least_squares(x, y), 0.0};

  Matrix aug(x.rows(), x.cols() + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    aug(i, 0) = 1.0;
    for (std::size_t j = 0; j < x.cols(); ++j) aug(i, j + 1) = x(i, j);
  }
  Vector b = least_squares(aug, y);
  OlsFit fit;
  fit.intercept = b[0];
  fit.coefficients.assign(b.begin() + 1, b.end());
  return fit;
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ShapeMismatch("symmetric_eigen: matrix is not square");
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = 0.5 * (a(i, j) + a(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw Error("symmetric_eigen: decomposition failed");
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()(i);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, i) = solver.eigenvectors()(r, i);
  }
  return out;
}

}  // namespace fscre
