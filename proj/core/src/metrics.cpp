#include "fscre/metrics.hpp"

#include <algorithm>
#include <set>

#include "fscre/errors.hpp"
#include "fscre/foundation.hpp"

namespace fscre {

double mspe(std::span<const double> y_true, std::span<const double> y_hat,
            std::optional<double> noise_var) {
  if (y_true.size() != y_hat.size() || y_true.empty()) {
    throw ShapeMismatch("mspe: lengths " + std::to_string(y_true.size()) + " and " +
                        std::to_string(y_hat.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_hat[i] - y_true[i];
    s += e * e;
  }
  s /= static_cast<double>(y_true.size());
  if (noise_var) s /= *noise_var;
  return s;
}

SelectionScores selection_scores(std::span<const Index> true_active,
                                 std::span<const Index> selected) {
  const std::set<Index> truth(true_active.begin(), true_active.end());
  const std::set<Index> chosen(selected.begin(), selected.end());
  if (truth.empty()) throw EmptyTruth("selection_scores: true active set is empty");
  std::size_t hits = 0;
  for (Index j : chosen) hits += truth.count(j);
  SelectionScores s;
  s.recall = static_cast<double>(hits) / static_cast<double>(truth.size());
  if (!chosen.empty()) s.precision = static_cast<double>(hits) / static_cast<double>(chosen.size());
  return s;
}

double median_of(std::vector<double> values) { return median(values); }

}  // namespace fscre
