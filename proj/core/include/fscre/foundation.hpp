#pragma once

#include "fscre/matrix.hpp"

namespace fscre {

// Gaussian-consistency factor for the MAD.
inline constexpr double kMadConsistency = 1.4826;

struct RobustScale {
  Vector location;  // per-column median
  Vector scale;     // per-column 1.4826 * MAD, strictly positive
};

// Detect-deviating-cells settings. Defaults follow the usual DDC choices:
// flag when the standardized residual exceeds sqrt(chi2_{0.99}(1)).
struct DdcConfig {
  double cutoff = 2.5758293035489004;
  std::size_t max_partners = 15;
  double min_partner_corr = 0.5;
  double trim_fraction = 0.1;
  double slope_min_abs = 0.1;
};

// Joint matrix Z = [y, X] after cellwise cleaning; response in column 0.
struct ImputationResult {
  Matrix z_imp;
  Matrix flags;  // 1 where a cell was replaced
  RobustScale scales;

  std::size_t n() const noexcept { return z_imp.rows(); }
  std::size_t p() const noexcept { return z_imp.cols() - 1; }
  Vector y() const { return z_imp.column(0); }
  Matrix x() const;
  std::size_t flagged_count() const;
};

struct CorrelationStructure {
  Matrix r_x;  // p x p
  Vector r_y;  // length p
};

struct Standardized {
  Matrix z;
  RobustScale scales;
};

// z_ij = (x_ij - median_j) / (1.4826 * MAD_j). Throws DegenerateColumn when a
// column has zero MAD.
Standardized robust_standardize(const Matrix& z);

double median(std::span<const double> values);

ImputationResult ddc_impute(const Matrix& z, const DdcConfig& cfg = {});

// No detection: Z passes through untouched. Used for the imputation ablation.
ImputationResult passthrough_imputation(const Matrix& z);

Matrix joint_matrix(std::span<const double> y, const Matrix& x);

// Pearson correlations of the imputed predictors with each other and with
// the imputed response. Throws DegenerateColumn on a zero-variance column
// (index counted in the joint matrix, 0 = response).
CorrelationStructure correlation_structure(const ImputationResult& imp);
CorrelationStructure correlation_structure(std::span<const double> y, const Matrix& x);

}  // namespace fscre
