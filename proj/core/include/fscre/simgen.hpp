#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "fscre/dataset.hpp"
#include "fscre/random.hpp"

namespace fscre {

// Simulation design. Active predictors occupy indices [0, sparsity) in
// consecutive blocks of `block_size` (the last block may be shorter); every
// other off-diagonal pair has correlation `rho_background`.
struct SimConfig {
  std::size_t n = 50;
  std::size_t p = 500;
  std::size_t sparsity = 50;
  double snr = 1.0;
  std::size_t block_size = 25;
  double rho_within = 0.8;
  double rho_background = 0.2;
  double coef_low = 0.0;
  double coef_high = 5.0;
  std::uint64_t seed = 1;

  void validate() const;  // throws InvalidConfig
};

enum class Scenario {
  Clean,
  Casewise,
  CellwiseMarginal,
  CellwiseCorrelation,
  MixtureMarginal,
  MixtureCorrelation,
};

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);  // throws InvalidConfig

struct ContaminationSpec {
  Scenario scenario = Scenario::Clean;
  double alpha = 0.0;   // row fraction (casewise, mixtures) or cell rate (cellwise)
  double alpha2 = 0.0;  // cellwise rate on the non-casewise rows of a mixture
  double leverage_c = 2.0;
  double marginal_shift = 10.0;
  double gamma_corr = 3.0;
  double beta_distort = 100.0;

  void validate() const;  // throws InvalidConfig
};

Matrix block_covariance(const SimConfig& cfg);

Dataset generate_clean(const SimConfig& cfg);

// Returns a contaminated copy of `data`; masks mark exactly the rewritten
// cells. `sigma` must be the covariance used to generate `data`.
Dataset contaminate(const Dataset& data, const ContaminationSpec& spec, const Matrix& sigma,
                    RandomSource& rng);

// Fresh clean rows sharing the realized beta and noise scale of `truth`.
Dataset make_test_set(const SimConfig& cfg, std::size_t m, const GroundTruth& truth);

// Eigenvector for the smallest eigenvalue, sign fixed so that its
// largest-magnitude entry is positive.
std::pair<double, Vector> min_eigenpair(const Matrix& symmetric);

}  // namespace fscre
