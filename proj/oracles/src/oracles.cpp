#include "fscre/oracles/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fscre::oracles {

Vector gaussian_elimination(const Matrix& a, std::span<const double> b) {
  const std::size_t n = a.rows();
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j);
    m[i][n] = b[i];
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (m[piv][col] == 0.0) throw std::runtime_error("gaussian_elimination: singular");
    std::swap(m[piv], m[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n] / m[i][i];
  return x;
}

Vector normal_equations(const Matrix& x, std::span<const double> y, bool intercept) {
  const std::size_t n = x.rows();
  const std::size_t q = x.cols() + (intercept ? 1 : 0);
  auto entry = [&](std::size_t i, std::size_t j) {
    if (intercept) return j == 0 ? 1.0 : x(i, j - 1);
    return x(i, j);
  };
  Matrix g(q, q, 0.0);
  Vector rhs(q, 0.0);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b)
      for (std::size_t i = 0; i < n; ++i) g(a, b) += entry(i, a) * entry(i, b);
    for (std::size_t i = 0; i < n; ++i) rhs[a] += entry(i, a) * y[i];
  }
  return gaussian_elimination(g, rhs);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double fold_cv_error(std::span<const double> y, const Matrix& x, std::span<const Index> subset,
                     std::span<const std::size_t> labels, std::size_t folds) {
  const std::size_t n = x.rows();
  double sse = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n; ++i)
      if (labels[i] != f) train.push_back(i);
    Matrix xt(train.size(), subset.size());
    Vector yt(train.size());
    for (std::size_t r = 0; r < train.size(); ++r) {
      yt[r] = y[train[r]];
      for (std::size_t c = 0; c < subset.size(); ++c) xt(r, c) = x(train[r], subset[c]);
    }
    const Vector b = normal_equations(xt, yt, true);
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != f) continue;
      double pred = b[0];
      for (std::size_t c = 0; c < subset.size(); ++c) pred += b[c + 1] * x(i, subset[c]);
      sse += (y[i] - pred) * (y[i] - pred);
    }
  }
  return sse / static_cast<double>(n);
}

double grid_search_s_scale(std::span<const double> residuals, double c0) {
  auto rho = [c0](double u) {
    const double t = u / c0;
    return std::abs(t) >= 1.0 ? 1.0 : 1.0 - std::pow(1.0 - t * t, 3);
  };
  auto excess = [&](double sigma) {
    double s = 0.0;
    for (double r : residuals) s += rho(r / sigma);
    return s / static_cast<double>(residuals.size()) - 0.5;
  };
  // Coarse logarithmic grid, then repeated linear refinement around the
  // sign change of the (decreasing) excess function.
  double lo = 1e-8, hi = 1e8;
  const int points = 200;
  double a = lo, b = hi;
  for (int k = 0; k < points; ++k) {
    const double s0 = lo * std::pow(hi / lo, static_cast<double>(k) / points);
    const double s1 = lo * std::pow(hi / lo, static_cast<double>(k + 1) / points);
    if (excess(s0) >= 0.0 && excess(s1) < 0.0) {
      a = s0;
      b = s1;
      break;
    }
  }
  for (int level = 0; level < 12; ++level) {
    const double h = (b - a) / points;
    for (int k = 0; k < points; ++k) {
      const double s0 = a + k * h, s1 = a + (k + 1) * h;
      if (excess(s0) >= 0.0 && excess(s1) < 0.0) {
        a = s0;
        b = s1;
        break;
      }
    }
  }
  return 0.5 * (a + b);
}

JacobiEigen jacobi_eigen(const Matrix& symmetric) {
  const std::size_t n = symmetric.rows();
  Matrix a = symmetric;
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto l, auto r) { return a(l, l) < a(r, r); });
  JacobiEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

OraclePath classical_lars_path(const Matrix& x_raw, std::span<const double> y_raw,
                               std::size_t steps) {
  const std::size_t n = x_raw.rows();
  const std::size_t p = x_raw.cols();
  if (steps > p || steps + 2 > n + 1) throw std::runtime_error("classical_lars_path: too many steps");

  // Standardize: centered, unit-norm columns; centered response.
  Matrix x = x_raw;
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x(i, j) -= mean;
      ss += x(i, j) * x(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) x(i, j) /= std::sqrt(ss);
  }
  Vector y(y_raw.begin(), y_raw.end());
  double ymean = 0.0;
  for (double v : y) ymean += v;
  ymean /= static_cast<double>(n);
  double ynorm = 0.0;
  for (double& v : y) {
    v -= ymean;
    ynorm += v * v;
  }
  ynorm = std::sqrt(ynorm);

  Vector mu(n, 0.0);
  auto correlations = [&] {
    Vector c(p, 0.0);
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t i = 0; i < n; ++i) c[j] += x(i, j) * (y[i] - mu[i]);
    return c;
  };

  OraclePath path;
  std::vector<bool> in_active(p, false);
  Vector c = correlations();
  std::size_t first = 0;
  for (std::size_t j = 1; j < p; ++j)
    if (std::abs(c[j]) > std::abs(c[first])) first = j;
  path.entry_order.push_back(first);
  path.step_sizes.push_back(std::abs(c[first]) / ynorm);
  path.max_correlations.push_back(std::abs(c[first]) / ynorm);
  in_active[first] = true;

  while (path.entry_order.size() < steps) {
    c = correlations();
    const auto& active = path.entry_order;
    const std::size_t s = active.size();
    double big_c = 0.0;
    for (auto j : active) big_c = std::max(big_c, std::abs(c[j]));

    // Signed active columns and their Gram matrix.
    Matrix xa(n, s);
    for (std::size_t k = 0; k < s; ++k) {
      const double sg = c[active[k]] < 0 ? -1.0 : 1.0;
      for (std::size_t i = 0; i < n; ++i) xa(i, k) = sg * x(i, active[k]);
    }
    Matrix gram(s, s, 0.0);
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b)
        for (std::size_t i = 0; i < n; ++i) gram(a, b) += xa(i, a) * xa(i, b);
    const Vector ginv1 = gaussian_elimination(gram, Vector(s, 1.0));
    double total = 0.0;
    for (double v : ginv1) total += v;
    const double big_a = 1.0 / std::sqrt(total);
    Vector u(n, 0.0);
    for (std::size_t k = 0; k < s; ++k)
      for (std::size_t i = 0; i < n; ++i) u[i] += big_a * ginv1[k] * xa(i, k);

    double gamma = std::numeric_limits<double>::infinity();
    std::size_t next = p;
    for (std::size_t j = 0; j < p; ++j) {
      if (in_active[j]) continue;
      double aj = 0.0;
      for (std::size_t i = 0; i < n; ++i) aj += x(i, j) * u[i];
      for (double g : {(big_c - c[j]) / (big_a - aj), (big_c + c[j]) / (big_a + aj)}) {
        if (g > 0.0 && g < gamma) {
          gamma = g;
          next = j;
        }
      }
    }
    if (next == p) throw std::runtime_error("classical_lars_path: no admissible step");
    for (std::size_t i = 0; i < n; ++i) mu[i] += gamma * u[i];
    path.entry_order.push_back(next);
    path.step_sizes.push_back(gamma / ynorm);
    path.max_correlations.push_back((big_c - gamma * big_a) / ynorm);
    in_active[next] = true;
  }
  return path;
}

}  // namespace fscre::oracles
