#pragma once

#include <cstdint>
#include <string>

#include "fscre/matrix.hpp"

namespace fscre {

// Tukey bisquare, normalized so that rho saturates at 1.
double bisquare_rho(double u, double c);
double bisquare_weight(double u, double c);  // psi(u) / u

inline constexpr double kBreakdownC = 1.5476;   // 50% breakdown S-scale
inline constexpr double kEfficiencyC = 4.685;   // 95% Gaussian efficiency

// sigma solving mean(rho(r_i / sigma; c0)) = 0.5, by bisection to 1e-10
// relative precision. Returns 0 when at least half of the residuals are exactly
// zero (exact fit); callers treat 0 as that flag.
double s_scale(std::span<const double> residuals, double c0 = kBreakdownC);

struct MmConfig {
  double c0 = kBreakdownC;
  double c1 = kEfficiencyC;
  std::size_t random_starts = 20;
  std::size_t max_iterations = 500;
  double tolerance = 1e-8;
  std::uint64_t seed = 7;
};

struct RobustFit {
  Vector coefficients;
  double intercept = 0.0;
  double scale = 0.0;  // 0 only for an exact fit
  bool converged = false;
  std::size_t iterations = 0;
  Vector m_objective;  // bisquare objective after each M-stage iteration
};

// MM regression: S-stage over an OLS start plus random elemental starts,
// then bisquare IRLS at the efficiency constant with the S-scale held fixed.
// Throws RankDeficient (singular design) and ShapeMismatch (X.cols >= rows).
RobustFit mm_fit(const Matrix& x, std::span<const double> y, bool intercept,
                 const MmConfig& cfg = {});

struct EnsembleModel {
  std::size_t p = 0;
  bool intercept = true;
  std::vector<IndexList> sets;
  std::vector<RobustFit> fits;
};

// Mean over sub-models of intercept_k + X[:, S_k] coef_k.
Vector predict(const EnsembleModel& model, const Matrix& x_new);

// Versioned JSON document: sets, coefficients, intercepts, scales, flags.
std::string to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const std::string& text);
void save_model(const std::string& path, const EnsembleModel& model);
EnsembleModel load_model(const std::string& path);

}  // namespace fscre
