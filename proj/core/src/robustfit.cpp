#include "fscre/robustfit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "fscre/errors.hpp"
#include "fscre/linalg.hpp"
#include "fscre/random.hpp"

namespace fscre {

double bisquare_rho(double u, double c) {
  const double t = u / c;
  if (std::abs(t) >= 1.0) return 1.0;
  const double v = 1.0 - t * t;
  return 1.0 - v * v * v;
}

double bisquare_weight(double u, double c) {
  const double t = u / c;
  if (std::abs(t) >= 1.0) return 0.0;
  const double v = 1.0 - t * t;
  return v * v;
}

namespace {

constexpr double kScaleTarget = 0.5;

double mean_rho(std::span<const double> r, double sigma, double c) {
  double s = 0.0;
  for (double v : r) s += bisquare_rho(v / sigma, c);
  return s / static_cast<double>(r.size());
}

Matrix design_of(const Matrix& x, bool intercept) {
  if (!intercept) return x;
  Matrix a(x.rows(), x.cols() + 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    a(i, 0) = 1.0;
    for (std::size_t j = 0; j < x.cols(); ++j) a(i, j + 1) = x(i, j);
  }
  return a;
}

Vector residuals(const Matrix& a, std::span<const double> y, std::span<const double> beta) {
  Vector r(y.begin(), y.end());
  for (std::size_t i = 0; i < a.rows(); ++i) r[i] -= dot(a.row(i), beta);
  return r;
}

Vector weighted_ls(const Matrix& a, std::span<const double> y, std::span<const double> w) {
  IndexList rows;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) rows.push_back(i);
  if (rows.size() <= a.cols()) throw RankDeficient("weighted fit: too few rows with weight");
  Matrix aw(rows.size(), a.cols());
  Vector yw(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double sw = std::sqrt(w[rows[k]]);
    for (std::size_t j = 0; j < a.cols(); ++j) aw(k, j) = sw * a(rows[k], j);
    yw[k] = sw * y[rows[k]];
  }
  return least_squares(aw, yw);
}

struct SCandidate {
  Vector beta;
  double scale = 0.0;
};

// IRLS steps for the S-scale objective; stops early on an exact fit or when
// the scale stabilizes.
SCandidate refine_s(const Matrix& a, std::span<const double> y, Vector beta, std::size_t steps,
                    double c0) {
  double scale = s_scale(residuals(a, y, beta), c0);
  for (std::size_t it = 0; it < steps && scale > 0.0; ++it) {
    const Vector r = residuals(a, y, beta);
    Vector w(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = bisquare_weight(r[i] / scale, c0);
    Vector next;
    try {
      next = weighted_ls(a, y, w);
    } catch (const RankDeficient&) {
      break;
    }
    const double next_scale = s_scale(residuals(a, y, next), c0);
    if (!(next_scale <= scale)) break;
    const bool stable = scale - next_scale <= 1e-10 * scale;
    beta = std::move(next);
    scale = next_scale;
    if (stable) break;
  }
  return {std::move(beta), scale};
}

}  // namespace

double s_scale(std::span<const double> residuals, double c0) {
  if (residuals.empty()) throw ShapeMismatch("s_scale: no residuals");
  std::size_t nonzero = 0;
  double hi = 0.0;
  for (double r : residuals) {
    nonzero += r != 0.0;
    hi = std::max(hi, std::abs(r));
  }
  if (2 * nonzero <= residuals.size()) return 0.0;

  while (mean_rho(residuals, hi, c0) >= kScaleTarget) hi *= 2.0;
  double lo = hi;
  while (mean_rho(residuals, lo, c0) < kScaleTarget) lo *= 0.5;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_rho(residuals, mid, c0) >= kScaleTarget)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

RobustFit mm_fit(const Matrix& x, std::span<const double> y, bool intercept, const MmConfig& cfg) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw ShapeMismatch("mm_fit: response length differs from rows");
  const Matrix a = design_of(x, intercept);
  const std::size_t q = a.cols();
  if (q >= n) {
    throw ShapeMismatch("mm_fit: needs fewer parameters (" + std::to_string(q) +
                        ") than observations (" + std::to_string(n) + ")");
  }

  RobustFit fit;
  auto unpack = [&](const Vector& beta) {
    if (intercept) {
      fit.intercept = beta[0];
      fit.coefficients.assign(beta.begin() + 1, beta.end());
    } else {
      fit.intercept = 0.0;
      fit.coefficients = beta;
    }
  };
  if (q == 0) {
    fit.scale = s_scale(y, cfg.c0);
    fit.converged = true;
    return fit;
  }

  // S-stage.
  std::vector<Vector> starts;
  starts.push_back(least_squares(a, y));
  RandomSource rng(cfg.seed);
  for (std::size_t s = 0; s < cfg.random_starts; ++s) {
    const IndexList rows = rng.sample_without_replacement(n, q);
    Vector ys(q);
    for (std::size_t k = 0; k < q; ++k) ys[k] = y[rows[k]];
    try {
      starts.push_back(solve_linear(a.select_rows(rows), ys));
    } catch (const RankDeficient&) {
      // singular elemental subset; draw the next one
    }
  }
  std::vector<SCandidate> cands;
  for (auto& b : starts) cands.push_back(refine_s(a, y, std::move(b), 2, cfg.c0));
  std::stable_sort(cands.begin(), cands.end(),
                   [](const SCandidate& l, const SCandidate& r) { return l.scale < r.scale; });
  cands.resize(std::min<std::size_t>(cands.size(), 5));
  SCandidate best;
  best.scale = std::numeric_limits<double>::infinity();
  for (auto& c : cands) {
    SCandidate done = c.scale > 0.0 ? refine_s(a, y, std::move(c.beta), 200, cfg.c0) : c;
    if (done.scale < best.scale) best = std::move(done);
  }

  fit.scale = best.scale;
  Vector beta = std::move(best.beta);
  if (best.scale == 0.0) {
    unpack(beta);
    fit.converged = true;
    return fit;
  }

  // M-stage with the S-scale fixed.
  const double sigma = best.scale;
  Vector r = residuals(a, y, beta);
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = bisquare_weight(r[i] / sigma, cfg.c1);
    Vector next;
    try {
      next = weighted_ls(a, y, w);
    } catch (const RankDeficient&) {
      break;
    }
    double delta = 0.0;
    for (std::size_t k = 0; k < q; ++k) delta = std::max(delta, std::abs(next[k] - beta[k]));
    beta = std::move(next);
    r = residuals(a, y, beta);
    double objective = 0.0;
    for (double v : r) objective += bisquare_rho(v / sigma, cfg.c1);
    fit.m_objective.push_back(objective);
    fit.iterations = it;
    if (delta <= cfg.tolerance * std::max(1.0, max_abs(beta))) {
      fit.converged = true;
      break;
    }
  }
  unpack(beta);
  return fit;
}

Vector predict(const EnsembleModel& model, const Matrix& x_new) {
  if (x_new.cols() != model.p) {
    throw ShapeMismatch("predict: expected " + std::to_string(model.p) + " columns, found " +
                        std::to_string(x_new.cols()));
  }
  if (model.fits.size() != model.sets.size() || model.fits.empty())
    throw ShapeMismatch("predict: model has no sub-models or mismatched fits");
  Vector out(x_new.rows(), 0.0);
  for (std::size_t k = 0; k < model.fits.size(); ++k) {
    const RobustFit& f = model.fits[k];
    const IndexList& set = model.sets[k];
    if (f.coefficients.size() != set.size())
      throw ShapeMismatch("predict: coefficient count differs from set size");
    for (std::size_t i = 0; i < x_new.rows(); ++i) {
      double v = f.intercept;
      for (std::size_t c = 0; c < set.size(); ++c) v += f.coefficients[c] * x_new(i, set[c]);
      out[i] += v;
    }
  }
  const double k = static_cast<double>(model.fits.size());
  for (double& v : out) v /= k;
  return out;
}

namespace {

constexpr const char* kFormat = "fscre-ensemble-model";
constexpr int kFormatVersion = 1;

}  // namespace

std::string to_json(const EnsembleModel& model) {
  nlohmann::json doc;
  doc["format"] = kFormat;
  doc["version"] = kFormatVersion;
  doc["index_base"] = 0;
  doc["p"] = model.p;
  doc["intercept"] = model.intercept;
  doc["models"] = nlohmann::json::array();
  for (std::size_t k = 0; k < model.fits.size(); ++k) {
    const RobustFit& f = model.fits[k];
    doc["models"].push_back({{"set", model.sets[k]},
                             {"coefficients", f.coefficients},
                             {"intercept", f.intercept},
                             {"scale", f.scale},
                             {"converged", f.converged},
                             {"iterations", f.iterations}});
  }
  return doc.dump(2);
}

EnsembleModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("model JSON: ") + e.what());
  }
  if (doc.value("format", "") != kFormat) throw Error("model JSON: unexpected format tag");
  if (doc.value("version", 0) != kFormatVersion)
    throw Error("model JSON: unsupported version " + doc.value("version", nlohmann::json()).dump());
  EnsembleModel m;
  try {
    m.p = doc.at("p").get<std::size_t>();
    m.intercept = doc.at("intercept").get<bool>();
    for (const auto& item : doc.at("models")) {
      m.sets.push_back(item.at("set").get<IndexList>());
      RobustFit f;
      f.coefficients = item.at("coefficients").get<Vector>();
      f.intercept = item.at("intercept").get<double>();
      f.scale = item.at("scale").get<double>();
      f.converged = item.at("converged").get<bool>();
      f.iterations = item.at("iterations").get<std::size_t>();
      m.fits.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model JSON: ") + e.what());
  }
  for (std::size_t k = 0; k < m.sets.size(); ++k) {
    if (m.sets[k].size() != m.fits[k].coefficients.size())
      throw Error("model JSON: model " + std::to_string(k) + " set/coefficient length mismatch");
    for (Index j : m.sets[k])
      if (j >= m.p) throw Error("model JSON: index " + std::to_string(j) + " out of range");
  }
  return m;
}

void save_model(const std::string& path, const EnsembleModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json(model) << '\n';
}

EnsembleModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace fscre
