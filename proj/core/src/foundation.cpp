#include "fscre/foundation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fscre/errors.hpp"

namespace fscre {
namespace {

// Column-major copy: column j occupies [j * rows, (j + 1) * rows).
std::vector<double> columns_of(const Matrix& m) {
  std::vector<double> out(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[j * m.rows() + i] = m(i, j);
  return out;
}

// Correlation of two robustly standardized columns, after discarding the
// rows with the largest |z_j z_h| products. Uncentered: the inputs are
// already centered at their medians.
class TrimmedCorrelation {
 public:
  TrimmedCorrelation(std::size_t n, double trim)
      : keep_(n - static_cast<std::size_t>(std::floor(trim * static_cast<double>(n)))),
        products_(n),
        scratch_(n) {}

  double operator()(const double* a, const double* b) {
    const std::size_t n = products_.size();
    for (std::size_t i = 0; i < n; ++i) {
      products_[i] = a[i] * b[i];
      scratch_[i] = std::abs(products_[i]);
    }
    double threshold = std::numeric_limits<double>::infinity();
    if (keep_ < n) {
      std::nth_element(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(keep_ - 1),
                       scratch_.end());
      threshold = scratch_[keep_ - 1];
    }
    std::size_t below = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(products_[i]) < threshold) ++below;
    std::size_t ties_allowed = keep_ - std::min(keep_, below);

    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ap = std::abs(products_[i]);
      if (ap > threshold) continue;
      if (ap == threshold) {
        if (ties_allowed == 0) continue;
        --ties_allowed;
      }
      sab += products_[i];
      saa += a[i] * a[i];
      sbb += b[i] * b[i];
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
  }

 private:
  std::size_t keep_;
  std::vector<double> products_;
  std::vector<double> scratch_;
};

struct Partner {
  std::size_t column;
  double weight;  // |correlation|
  double slope;
};

double robust_slope(const double* target, const double* partner, std::size_t n, double min_abs,
                    std::vector<double>& buffer) {
  buffer.clear();
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(partner[i]) > min_abs) buffer.push_back(target[i] / partner[i]);
  if (buffer.empty()) return std::numeric_limits<double>::quiet_NaN();
  return median(buffer);
}

}  // namespace

Matrix ImputationResult::x() const {
  Matrix out(z_imp.rows(), z_imp.cols() - 1);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = z_imp(i, j + 1);
  return out;
}

std::size_t ImputationResult::flagged_count() const {
  std::size_t c = 0;
  for (double f : flags.data()) c += f != 0.0;
  return c;
}

double median(std::span<const double> values) {
  if (values.empty()) throw ShapeMismatch("median of an empty range");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

Standardized robust_standardize(const Matrix& z) {
  const std::size_t n = z.rows();
  const std::size_t cols = z.cols();
  if (n == 0 || cols == 0) throw ShapeMismatch("robust_standardize: empty matrix");
  Standardized out{Matrix(n, cols), {Vector(cols), Vector(cols)}};
  Vector column(n), dev(n);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = z(i, j);
    const double med = median(column);
    for (std::size_t i = 0; i < n; ++i) dev[i] = std::abs(column[i] - med);
    const double mad = median(dev);
    if (!(mad > 0.0)) {
      throw DegenerateColumn(j, "column " + std::to_string(j) + " has zero MAD");
    }
    const double s = kMadConsistency * mad;
    out.scales.location[j] = med;
    out.scales.scale[j] = s;
    for (std::size_t i = 0; i < n; ++i) out.z(i, j) = (column[i] - med) / s;
  }
  return out;
}

Matrix joint_matrix(std::span<const double> y, const Matrix& x) {
  if (y.size() != x.rows()) throw ShapeMismatch("joint_matrix: y length differs from X rows");
  Matrix z(x.rows(), x.cols() + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    z(i, 0) = y[i];
    for (std::size_t j = 0; j < x.cols(); ++j) z(i, j + 1) = x(i, j);
  }
  return z;
}

ImputationResult passthrough_imputation(const Matrix& z) {
  Standardized st = robust_standardize(z);
  return {z, Matrix(z.rows(), z.cols(), 0.0), std::move(st.scales)};
}

ImputationResult ddc_impute(const Matrix& z, const DdcConfig& cfg) {
  const std::size_t n = z.rows();
  const std::size_t cols = z.cols();
  if (cols < 2) throw TooFewColumns("ddc_impute: need at least two columns");
  if (n < 10) throw ShapeMismatch("ddc_impute: need at least 10 rows");

  Standardized st = robust_standardize(z);
  const std::vector<double> zc = columns_of(st.z);
  auto col = [&](std::size_t j) { return zc.data() + j * n; };

  // Pairwise robust correlations, exact O(n p^2) scan.
  Matrix corr(cols, cols, 0.0);
  {
    TrimmedCorrelation tc(n, cfg.trim_fraction);
    for (std::size_t j = 0; j < cols; ++j) {
      corr(j, j) = 1.0;
      for (std::size_t h = j + 1; h < cols; ++h) {
        const double c = tc(col(j), col(h));
        corr(j, h) = c;
        corr(h, j) = c;
      }
    }
  }

  ImputationResult out{z, Matrix(n, cols, 0.0), st.scales};
  std::vector<double> buffer;
  buffer.reserve(n);
  IndexList order(cols);
  Vector prediction(n), residual(n), abs_residual(n);

  for (std::size_t j = 0; j < cols; ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ca = std::abs(corr(j, a)), cb = std::abs(corr(j, b));
      return ca != cb ? ca > cb : a < b;
    });
    std::vector<Partner> partners;
    for (std::size_t h : order) {
      if (partners.size() == cfg.max_partners) break;
      if (h == j) continue;
      const double w = std::abs(corr(j, h));
      if (w < cfg.min_partner_corr) break;
      const double b = robust_slope(col(j), col(h), n, cfg.slope_min_abs, buffer);
      if (std::isnan(b)) continue;
      partners.push_back({h, w, b});
    }

    // Marginally outlying partner cells do not vote; with no voter the
    // prediction falls back to the column location (z = 0).
    for (std::size_t i = 0; i < n; ++i) {
      double num = 0.0, den = 0.0;
      for (const Partner& pt : partners) {
        const double zih = col(pt.column)[i];
        if (std::abs(zih) > cfg.cutoff) continue;
        num += pt.weight * pt.slope * zih;
        den += pt.weight;
      }
      prediction[i] = den > 0.0 ? num / den : 0.0;
      residual[i] = col(j)[i] - prediction[i];
    }

    const double res_center = median(residual);
    for (std::size_t i = 0; i < n; ++i) abs_residual[i] = std::abs(residual[i] - res_center);
    const double res_scale = kMadConsistency * median(abs_residual);
    if (!(res_scale > 0.0)) continue;

    const double m = st.scales.location[j];
    const double s = st.scales.scale[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(residual[i]) / res_scale > cfg.cutoff) {
        out.flags(i, j) = 1.0;
        out.z_imp(i, j) = s * prediction[i] + m;
      }
    }
  }
  return out;
}

namespace {

// Centers and scales each column to unit norm; column-major output.
std::vector<double> unit_columns(const Matrix& m, std::size_t first_index_offset) {
  const std::size_t n = m.rows();
  std::vector<double> out = columns_of(m);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double* c = out.data() + j * n;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += c[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] -= mean;
      ss += c[i] * c[i];
    }
    if (!(ss > 0.0)) {
      throw DegenerateColumn(j + first_index_offset,
                             "column " + std::to_string(j + first_index_offset) +
                                 " has zero variance after imputation");
    }
    const double inv = 1.0 / std::sqrt(ss);
    for (std::size_t i = 0; i < n; ++i) c[i] *= inv;
  }
  return out;
}

}  // namespace

CorrelationStructure correlation_structure(std::span<const double> y, const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (y.size() != n) throw ShapeMismatch("correlation_structure: y length differs from X rows");
  const std::vector<double> yc = unit_columns(Matrix(n, 1, Vector(y.begin(), y.end())), 0);
  const std::vector<double> xc = unit_columns(x, 1);

  CorrelationStructure cs{Matrix(p, p, 0.0), Vector(p)};
  for (std::size_t j = 0; j < p; ++j) {
    const double* a = xc.data() + j * n;
    cs.r_x(j, j) = 1.0;
    for (std::size_t h = j + 1; h < p; ++h) {
      const double* b = xc.data() + h * n;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
      s = std::clamp(s, -1.0, 1.0);
      cs.r_x(j, h) = s;
      cs.r_x(h, j) = s;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * yc[i];
    cs.r_y[j] = std::clamp(s, -1.0, 1.0);
  }
  return cs;
}

CorrelationStructure correlation_structure(const ImputationResult& imp) {
  return correlation_structure(imp.y(), imp.x());
}

}  // namespace fscre
