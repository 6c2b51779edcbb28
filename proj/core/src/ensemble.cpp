#include "fscre/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "fscre/errors.hpp"
#include "fscre/linalg.hpp"

namespace fscre {

std::size_t FscreConfig::resolved_max_vars(std::size_t n, std::size_t p) const {
  if (max_vars) return *max_vars;
  return n > cv_folds ? std::min(n - cv_folds, p) : 0;
}

void FscreConfig::validate(std::size_t n, std::size_t p) const {
  if (models == 0) throw InvalidConfig("K must be at least 1");
  if (!(tau > 0.0)) throw InvalidConfig("tau must be positive");
  if (cv_folds < 2) throw InvalidConfig("need at least 2 CV folds");
  if (cv_folds > n) throw InvalidConfig("more CV folds than observations");
  if (max_vars && *max_vars > p) throw InvalidConfig("max_vars exceeds p");
}

std::size_t FoldAssignment::min_training_size() const {
  std::vector<std::size_t> sizes(folds, 0);
  for (auto l : labels) ++sizes[l];
  const std::size_t largest = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  return labels.size() - largest;
}

FoldAssignment fold_assignment(std::size_t n, std::size_t v, RandomSource& rng) {
  if (v == 0 || v > n) throw InvalidConfig("fold_assignment: need 1 <= v <= n");
  FoldAssignment f{std::vector<std::size_t>(n), v};
  const auto perm = rng.permutation(n);
  for (std::size_t k = 0; k < n; ++k) f.labels[perm[k]] = k % v;
  return f;
}

CvEvaluator::CvEvaluator(std::span<const double> y, const Matrix& x, FoldAssignment folds,
                         bool intercept)
    : y_(y.begin(), y.end()),
      x_cols_(x.rows() * x.cols()),
      n_(x.rows()),
      folds_(std::move(folds)),
      train_rows_(folds_.folds),
      test_rows_(folds_.folds),
      intercept_(intercept) {
  if (y.size() != n_ || folds_.labels.size() != n_)
    throw ShapeMismatch("CvEvaluator: response, design and folds disagree on n");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) x_cols_[j * n_ + i] = x(i, j);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t f = 0; f < folds_.folds; ++f)
      (folds_.labels[i] == f ? test_rows_[f] : train_rows_[f]).push_back(i);
  }
}

double CvEvaluator::operator()(std::span<const Index> subset) const {
  double sse = 0.0;
  const std::size_t s = subset.size();
  for (std::size_t f = 0; f < folds_.folds; ++f) {
    const IndexList& train = train_rows_[f];
    const IndexList& test = test_rows_[f];
    if (test.empty()) continue;
    const double m = static_cast<double>(train.size());
    // Without an explicit intercept the fold is centered on its training
    // means, which gives the same fit as the intercept model.
    double y_shift = 0.0;
    Vector x_shift(s, 0.0);
    if (!intercept_) {
      for (Index i : train) y_shift += y_[i];
      y_shift /= m;
      for (std::size_t c = 0; c < s; ++c) {
        const double* col = &x_cols_[subset[c] * n_];
        for (Index i : train) x_shift[c] += col[i];
        x_shift[c] /= m;
      }
    }
    Vector coef;
    double icpt = 0.0;
    if (s == 0) {
      if (intercept_) {
        for (Index i : train) icpt += y_[i];
        icpt /= m;
      }
    } else {
      Matrix xt(train.size(), s);
      Vector yt(train.size());
      for (std::size_t r = 0; r < train.size(); ++r) {
        yt[r] = y_[train[r]] - y_shift;
        for (std::size_t c = 0; c < s; ++c)
          xt(r, c) = x_cols_[subset[c] * n_ + train[r]] - x_shift[c];
      }
      OlsFit fit = ols_fit(xt, yt, intercept_);
      coef = std::move(fit.coefficients);
      icpt = fit.intercept;
    }
    for (Index i : test) {
      double pred = icpt + y_shift;
      for (std::size_t c = 0; c < s; ++c)
        pred += coef[c] * (x_cols_[subset[c] * n_ + i] - x_shift[c]);
      const double e = y_[i] - pred;
      sse += e * e;
    }
  }
  return sse / static_cast<double>(n_);
}

double cv_error(const ImputationResult& imp, std::span<const Index> subset,
                const FoldAssignment& folds, bool intercept) {
  return CvEvaluator(imp.y(), imp.x(), folds, intercept)(subset);
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::BelowTolerance: return "BelowTolerance";
    case StopReason::NoCandidates: return "NoCandidates";
    case StopReason::PoolExhausted: return "PoolExhausted";
    case StopReason::MaxVars: return "MaxVars";
  }
  return "Unknown";
}

IndexList SelectionResult::selected_union() const {
  IndexList all;
  for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate {
  ProposalRecord record;
  LarsProposal proposal;
  double error_with = 0.0;
};

}  // namespace

SelectionResult run_selection(const CorrelationStructure& structure, const ImputationResult& imp,
                              const FscreConfig& cfg, const AcceptObserver& observer) {
  const std::size_t n = imp.n();
  const std::size_t p = structure.r_y.size();
  if (structure.r_x.rows() != p || structure.r_x.cols() != p || imp.p() != p)
    throw ShapeMismatch("run_selection: correlation structure and imputed data disagree on p");
  cfg.validate(n, p);

  RandomSource root(cfg.seed);
  RandomSource fold_rng = root.child(0);
  RandomSource tie_rng = root.child(1);
  const bool arbitrate = cfg.arbitration == Arbitration::CrossValidated;
  const CvEvaluator cv(imp.y(), imp.x(), fold_assignment(n, cfg.cv_folds, fold_rng),
                       cfg.intercept);
  const std::size_t max_vars = cfg.resolved_max_vars(n, p);
  // A model may grow while its OLS fit, location included, stays strictly
  // over-determined on every training fold.
  const std::size_t min_train = cv.folds().min_training_size();
  auto can_grow = [&](std::size_t size) { return size + 2 < min_train; };

  SelectionResult result;
  result.sets.assign(cfg.models, {});
  result.states.assign(cfg.models, SubModelState::initial(structure.r_y));
  std::vector<double> cached(cfg.models, 0.0);
  if (arbitrate) {
    const double base = cv({});
    std::fill(cached.begin(), cached.end(), base);
  }
  IndexList pool(p);
  std::iota(pool.begin(), pool.end(), Index{0});
  std::size_t selected = 0;

  for (std::size_t iteration = 1;; ++iteration) {
    CompetitionRecord record;
    record.iteration = iteration;
    auto stop = [&](StopReason reason) {
      record.stop_reason = reason;
      result.stop_reason = reason;
      result.trace.push_back(std::move(record));
    };
    if (pool.empty()) {
      stop(StopReason::PoolExhausted);
      break;
    }
    if (selected >= max_vars) {
      stop(StopReason::MaxVars);
      break;
    }

    std::vector<Candidate> candidates;
    for (std::size_t k = 0; k < cfg.models; ++k) {
      if (!can_grow(result.sets[k].size())) continue;
      LarsProposal prop;
      try {
        prop = propose(structure.r_x, result.states[k], pool);
      } catch (const NotPositiveDefinite&) {
        continue;
      }
      if (!prop.candidate) continue;
      Candidate c;
      c.record = {k, *prop.candidate, prop.step, std::numeric_limits<double>::quiet_NaN()};
      if (arbitrate) {
        IndexList grown = result.sets[k];
        grown.push_back(*prop.candidate);
        try {
          c.error_with = cv(grown);
          c.record.benefit = cached[k] - c.error_with;
        } catch (const RankDeficient&) {
          c.record.benefit = kNegInf;
        } catch (const ShapeMismatch&) {
          c.record.benefit = kNegInf;
        }
      }
      c.proposal = std::move(prop);
      candidates.push_back(std::move(c));
    }
    for (const auto& c : candidates) record.proposals.push_back(c.record);
    if (candidates.empty()) {
      stop(StopReason::NoCandidates);
      break;
    }

    std::size_t win = 0;
    bool accept = true;
    if (arbitrate) {
      double best = kNegInf;
      for (const auto& c : candidates) best = std::max(best, c.record.benefit);
      std::vector<std::size_t> tied;
      for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i].record.benefit == best) tied.push_back(i);
      win = tied.size() > 1 ? tied[tie_rng.index(tied.size())] : tied.front();
      const double b = candidates[win].record.benefit;
      const double base = cached[candidates[win].record.model];
      accept = b > 0.0 && b / base > cfg.tau;
    } else {
      for (std::size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].record.gamma < candidates[win].record.gamma) win = i;
    }
    if (!accept) {
      stop(StopReason::BelowTolerance);
      break;
    }

    Candidate& w = candidates[win];
    const std::size_t k = w.record.model;
    const Index j = w.record.candidate;
    result.states[k] = apply_step(result.states[k], w.proposal, pool);
    pool.erase(std::find(pool.begin(), pool.end(), j));
    result.sets[k].push_back(j);
    cached[k] = w.error_with;
    ++selected;
    record.winner = win;
    result.trace.push_back(std::move(record));
    if (observer) observer(k, result.states[k]);
  }
  return result;
}

void write_trace_csv(const std::string& path, const SelectionResult& result) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << "iteration,model,candidate,gamma,benefit,winner,stop_reason\n";
  for (const auto& rec : result.trace) {
    const std::string reason = rec.stop_reason ? to_string(*rec.stop_reason) : "";
    if (rec.proposals.empty()) {
      out << rec.iteration << ",,,,,0," << reason << '\n';
      continue;
    }
    for (std::size_t i = 0; i < rec.proposals.size(); ++i) {
      const auto& pr = rec.proposals[i];
      out << rec.iteration << ',' << pr.model << ',' << pr.candidate << ',' << pr.gamma << ','
          << pr.benefit << ',' << (rec.winner == i ? 1 : 0) << ',' << reason << '\n';
    }
  }
}

}  // namespace fscre
