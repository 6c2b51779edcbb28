#include "fscre/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "fscre/errors.hpp"
#include "fscre/linalg.hpp"

namespace fscre {
namespace {

enum Stream : std::uint64_t { kBeta = 0, kDesign = 1, kNoise = 2, kTest = 3 };

Matrix draw_rows(const Cholesky& chol, std::size_t m, RandomSource& rng) {
  const Matrix& l = chol.lower();
  const std::size_t p = l.rows();
  Matrix x(m, p);
  Vector z(p);
  for (std::size_t i = 0; i < m; ++i) {
    for (auto& v : z) v = rng.normal();
    auto row = x.row(i);
    for (std::size_t a = 0; a < p; ++a) {
      auto la = l.row(a);
      double s = 0.0;
      for (std::size_t b = 0; b <= a; ++b) s += la[b] * z[b];
      row[a] = s;
    }
  }
  return x;
}

Cholesky covariance_factor(const SimConfig& cfg) {
  try {
    return Cholesky(block_covariance(cfg));
  } catch (const NotPositiveDefinite&) {
    throw InvalidConfig("simulation covariance is not positive definite");
  }
}

double sample_variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

void replace_casewise(Dataset& out, const ContaminationSpec& spec, const Matrix& sigma,
                      std::span<const Index> rows, RandomSource& rng) {
  auto [lambda, u] = min_eigenpair(sigma);
  (void)lambda;
  Vector beta_cont = out.truth->beta;
  for (double& b : beta_cont) b *= spec.beta_distort;
  const double sd = std::sqrt(0.1);
  for (Index i : rows) {
    auto row = out.x.row(i);
    for (std::size_t j = 0; j < out.p(); ++j) {
      row[j] = sd * rng.normal() + spec.leverage_c * u[j];
      out.truth->mask_x(i, j) = 1.0;
    }
    out.y[i] = dot(row, beta_cont);
    out.truth->mask_y[i] = 1.0;
  }
}

void replace_marginal(Dataset& out, const ContaminationSpec& spec, double rate,
                      std::span<const Index> rows, RandomSource& rng) {
  for (Index i : rows) {
    for (std::size_t j = 0; j < out.p(); ++j) {
      if (!rng.bernoulli(rate)) continue;
      out.x(i, j) = spec.marginal_shift + rng.normal();
      out.truth->mask_x(i, j) = 1.0;
    }
  }
}

void replace_correlation(Dataset& out, const ContaminationSpec& spec, const Matrix& sigma,
                         double rate, std::span<const Index> rows, RandomSource& rng) {
  const std::size_t p = out.p();
  std::size_t budget = static_cast<std::size_t>(
      std::llround(rate * static_cast<double>(rows.size()) * static_cast<double>(p)));
  IndexList open(rows.begin(), rows.end());  // rows with clean cells left
  while (budget > 0 && !open.empty()) {
    const std::size_t pick = rng.index(open.size());
    const Index i = open[pick];
    IndexList clean;
    for (std::size_t j = 0; j < p; ++j)
      if (out.truth->mask_x(i, j) == 0.0) clean.push_back(j);
    std::size_t size = 5 + rng.index(11);
    size = std::min({size, clean.size(), budget});
    auto chosen = rng.sample_without_replacement(clean.size(), size);
    IndexList group;
    for (auto c : chosen) group.push_back(clean[c]);
    std::sort(group.begin(), group.end());

    auto [lambda, v] = min_eigenpair(sigma.select(group, group));
    (void)lambda;
    const double scale = spec.gamma_corr * std::sqrt(static_cast<double>(group.size()));
    for (std::size_t k = 0; k < group.size(); ++k) {
      out.x(i, group[k]) = scale * v[k];
      out.truth->mask_x(i, group[k]) = 1.0;
    }
    budget -= group.size();
    if (group.size() == clean.size()) open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
  }
}

}  // namespace

void SimConfig::validate() const {
  if (n < 2 || p < 1) throw InvalidConfig("simulation needs n >= 2 and p >= 1");
  if (sparsity > p) throw InvalidConfig("sparsity exceeds p");
  if (!(snr > 0.0)) throw InvalidConfig("snr must be positive");
  if (block_size == 0) throw InvalidConfig("block_size must be positive");
  if (!(std::abs(rho_within) < 1.0) || !(std::abs(rho_background) < 1.0))
    throw InvalidConfig("correlations must lie in (-1, 1)");
  if (!(rho_within > rho_background))
    throw InvalidConfig("rho_within must exceed rho_background");
  if (!(coef_low <= coef_high)) throw InvalidConfig("coefficient range is empty");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Clean: return "clean";
    case Scenario::Casewise: return "casewise";
    case Scenario::CellwiseMarginal: return "cellwise-marginal";
    case Scenario::CellwiseCorrelation: return "cellwise-correlation";
    case Scenario::MixtureMarginal: return "mixture-marginal";
    case Scenario::MixtureCorrelation: return "mixture-correlation";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  for (auto s : {Scenario::Clean, Scenario::Casewise, Scenario::CellwiseMarginal,
                 Scenario::CellwiseCorrelation, Scenario::MixtureMarginal,
                 Scenario::MixtureCorrelation}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidConfig("unknown contamination scenario '" + name + "'");
}

void ContaminationSpec::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0) || !(alpha2 >= 0.0 && alpha2 < 1.0))
    throw InvalidConfig("contamination rates must lie in [0, 1)");
  if (!(alpha + alpha2 < 1.0)) throw InvalidConfig("alpha + alpha2 must be below 1");
  const bool mixture =
      scenario == Scenario::MixtureMarginal || scenario == Scenario::MixtureCorrelation;
  if (scenario == Scenario::Clean && (alpha != 0.0 || alpha2 != 0.0))
    throw InvalidConfig("clean scenario takes no contamination rates");
  if (!mixture && alpha2 != 0.0)
    throw InvalidConfig("alpha2 only applies to mixture scenarios");
}

Matrix block_covariance(const SimConfig& cfg) {
  cfg.validate();
  Matrix sigma(cfg.p, cfg.p, cfg.rho_background);
  for (std::size_t j = 0; j < cfg.p; ++j) sigma(j, j) = 1.0;
  for (std::size_t start = 0; start < cfg.sparsity; start += cfg.block_size) {
    const std::size_t stop = std::min(cfg.sparsity, start + cfg.block_size);
    for (std::size_t a = start; a < stop; ++a)
      for (std::size_t b = start; b < stop; ++b)
        if (a != b) sigma(a, b) = cfg.rho_within;
  }
  return sigma;
}

Dataset generate_clean(const SimConfig& cfg) {
  cfg.validate();
  const Cholesky chol = covariance_factor(cfg);
  RandomSource root(cfg.seed);

  RandomSource beta_rng = root.child(kBeta);
  Vector beta(cfg.p, 0.0);
  for (std::size_t j = 0; j < cfg.sparsity; ++j) {
    double magnitude = 0.0;
    while (magnitude == 0.0) magnitude = beta_rng.uniform(cfg.coef_low, cfg.coef_high);
    beta[j] = beta_rng.bernoulli(0.5) ? magnitude : -magnitude;
  }

  RandomSource design_rng = root.child(kDesign);
  Dataset d;
  d.x = draw_rows(chol, cfg.n, design_rng);
  const Vector signal = multiply(d.x, beta);
  const double signal_var = sample_variance(signal);
  const double noise_sd = signal_var > 0.0 ? std::sqrt(signal_var / cfg.snr) : 1.0;

  RandomSource noise_rng = root.child(kNoise);
  d.y.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) d.y[i] = signal[i] + noise_sd * noise_rng.normal();

  GroundTruth truth;
  truth.beta = std::move(beta);
  truth.active_set = active_indices(truth.beta);
  truth.mask_x = Matrix(cfg.n, cfg.p, 0.0);
  truth.mask_y = Vector(cfg.n, 0.0);
  truth.noise_sd = noise_sd;
  d.truth = std::move(truth);
  return d;
}

Dataset contaminate(const Dataset& data, const ContaminationSpec& spec, const Matrix& sigma,
                    RandomSource& rng) {
  spec.validate();
  data.validate();
  if (!data.truth) throw InvalidConfig("contaminate: dataset carries no ground truth");
  if (sigma.rows() != data.p() || sigma.cols() != data.p())
    throw ShapeMismatch("contaminate: covariance shape differs from p");

  Dataset out = data;
  IndexList all(data.n());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  auto casewise_rows = [&](double fraction) {
    const auto count = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(data.n())));
    IndexList rows = rng.sample_without_replacement(data.n(), count);
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  auto complement = [&](const IndexList& rows) {
    IndexList rest;
    std::set_difference(all.begin(), all.end(), rows.begin(), rows.end(),
                        std::back_inserter(rest));
    return rest;
  };

  switch (spec.scenario) {
    case Scenario::Clean:
      break;
    case Scenario::Casewise:
      replace_casewise(out, spec, sigma, casewise_rows(spec.alpha), rng);
      break;
    case Scenario::CellwiseMarginal:
      replace_marginal(out, spec, spec.alpha, all, rng);
      break;
    case Scenario::CellwiseCorrelation:
      replace_correlation(out, spec, sigma, spec.alpha, all, rng);
      break;
    case Scenario::MixtureMarginal: {
      const IndexList rows = casewise_rows(spec.alpha);
      replace_casewise(out, spec, sigma, rows, rng);
      replace_marginal(out, spec, spec.alpha2, complement(rows), rng);
      break;
    }
    case Scenario::MixtureCorrelation: {
      const IndexList rows = casewise_rows(spec.alpha);
      replace_casewise(out, spec, sigma, rows, rng);
      replace_correlation(out, spec, sigma, spec.alpha2, complement(rows), rng);
      break;
    }
  }
  return out;
}

Dataset make_test_set(const SimConfig& cfg, std::size_t m, const GroundTruth& truth) {
  cfg.validate();
  if (m == 0) throw InvalidConfig("test set size must be positive");
  if (truth.beta.size() != cfg.p) throw ShapeMismatch("make_test_set: beta length differs from p");
  const Cholesky chol = covariance_factor(cfg);
  RandomSource rng = RandomSource(cfg.seed).child(kTest);
  Dataset d;
  d.x = draw_rows(chol, m, rng);
  d.y = multiply(d.x, truth.beta);
  for (double& v : d.y) v += truth.noise_sd * rng.normal();
  GroundTruth t = truth;
  t.mask_x = Matrix(m, cfg.p, 0.0);
  t.mask_y = Vector(m, 0.0);
  d.truth = std::move(t);
  return d;
}

std::pair<double, Vector> min_eigenpair(const Matrix& symmetric) {
  SymmetricEigen eig = symmetric_eigen(symmetric);
  Vector v = eig.vectors.column(0);
  std::size_t arg = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[arg])) arg = k;
  if (v[arg] < 0.0)
    for (double& x : v) x = -x;
  return {eig.values[0], std::move(v)};
}

}  // namespace fscre
