#pragma once

#include <chrono>
#include <optional>
#include <type_traits>
#include <utility>

#include "fscre/matrix.hpp"

namespace fscre {

struct EvalReport {
  double mspe = 0.0;
  double recall = 0.0;
  std::optional<double> precision;  // missing when nothing was selected
  double cpu_seconds = 0.0;
  std::size_t selected_count = 0;
};

// ||y_hat - y_true||^2 / m, divided by noise_var when given.
double mspe(std::span<const double> y_true, std::span<const double> y_hat,
            std::optional<double> noise_var = std::nullopt);

struct SelectionScores {
  double recall = 0.0;
  std::optional<double> precision;
};

// Throws EmptyTruth when the true active set is empty.
SelectionScores selection_scores(std::span<const Index> true_active,
                                 std::span<const Index> selected);

// Runs `work` and measures its wall-clock duration on the steady clock.
template <class F>
auto timed(F&& work) {
  const auto start = std::chrono::steady_clock::now();
  if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
    std::forward<F>(work)();
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    return d.count();
  } else {
    auto result = std::forward<F>(work)();
    const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
    return std::pair{std::move(result), d.count()};
  }
}

double median_of(std::vector<double> values);

}  // namespace fscre
