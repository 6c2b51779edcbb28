#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "fscre/foundation.hpp"
#include "fscre/lars.hpp"
#include "fscre/random.hpp"

namespace fscre {

enum class Arbitration {
  CrossValidated,  // benefit = CV(S_k) - CV(S_k + j), tolerance test on the winner
  Unconditional,   // test hook: smallest LARS step wins and is always accepted
};

struct FscreConfig {
  std::size_t models = 10;
  double tau = 0.01;
  std::size_t cv_folds = 5;
  std::optional<std::size_t> max_vars;  // default min(n - v, p)
  bool intercept = true;
  std::uint64_t seed = 1;
  Arbitration arbitration = Arbitration::CrossValidated;

  std::size_t resolved_max_vars(std::size_t n, std::size_t p) const;
  void validate(std::size_t n, std::size_t p) const;  // throws InvalidConfig
};

struct FoldAssignment {
  std::vector<std::size_t> labels;  // labels[i] in [0, folds)
  std::size_t folds = 0;

  std::size_t min_training_size() const;
};

FoldAssignment fold_assignment(std::size_t n, std::size_t v, RandomSource& rng);

// Mean squared out-of-fold error of OLS fits of y on X[:, subset]. An empty
// subset predicts the training mean (intercept) or zero. Throws RankDeficient
// or ShapeMismatch when a training fold cannot support the fit.
double cv_error(const ImputationResult& imp, std::span<const Index> subset,
                const FoldAssignment& folds, bool intercept);

// Same computation with the response and predictors held column-major, so the
// selection loop does not rebuild them for every call.
class CvEvaluator {
 public:
  CvEvaluator(std::span<const double> y, const Matrix& x, FoldAssignment folds, bool intercept);

  double operator()(std::span<const Index> subset) const;
  const FoldAssignment& folds() const noexcept { return folds_; }

 private:
  Vector y_;
  std::vector<double> x_cols_;
  std::size_t n_;
  FoldAssignment folds_;
  std::vector<IndexList> train_rows_;
  std::vector<IndexList> test_rows_;
  bool intercept_;
};

enum class StopReason { BelowTolerance, NoCandidates, PoolExhausted, MaxVars };
std::string to_string(StopReason r);

struct ProposalRecord {
  std::size_t model = 0;
  Index candidate = 0;
  double gamma = 0.0;
  double benefit = 0.0;  // -inf for rejected (rank-deficient) proposals; NaN when not evaluated
};

struct CompetitionRecord {
  std::size_t iteration = 0;
  std::vector<ProposalRecord> proposals;
  std::optional<std::size_t> winner;  // index into proposals, set when accepted
  std::optional<StopReason> stop_reason;
};

struct SelectionResult {
  std::vector<IndexList> sets;
  std::vector<SubModelState> states;
  std::vector<CompetitionRecord> trace;
  StopReason stop_reason = StopReason::NoCandidates;

  IndexList selected_union() const;  // ascending
};

// Called after every accepted step with the winning model and its new state.
using AcceptObserver = std::function<void(std::size_t model, const SubModelState& state)>;

SelectionResult run_selection(const CorrelationStructure& structure, const ImputationResult& imp,
                              const FscreConfig& cfg, const AcceptObserver& observer = {});

// CSV: iteration,model,candidate,gamma,benefit,winner,stop_reason
void write_trace_csv(const std::string& path, const SelectionResult& result);

}  // namespace fscre
