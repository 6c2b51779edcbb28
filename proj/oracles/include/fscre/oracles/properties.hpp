#pragma once

// Invariance, equivalence and stability checks over seeded random instances.
// Each check runs one instance and reports whether the property held.

#include <cstdint>
#include <string>

#include "fscre/dataset.hpp"
#include "fscre/ensemble.hpp"
#include "fscre/pipeline.hpp"

namespace fscre::oracles {

struct PropertyResult {
  bool passed = false;
  std::string detail;
};

// Block-correlated data with light cellwise contamination, so every stage of
// the pipeline (including imputation) does real work.
Dataset generic_dataset(std::uint64_t seed, std::size_t n, std::size_t p, bool contaminated);

struct SelectionRun {
  ImputationResult imputation;
  CorrelationStructure structure;
  SelectionResult selection;
};
SelectionRun run_foundation_and_selection(std::span<const double> y, const Matrix& x,
                                          const PipelineConfig& cfg);

// Sorted sets, sorted lexicographically: the unordered family of index sets.
std::vector<IndexList> canonical_family(const std::vector<IndexList>& sets);

struct LarsEquivalence {
  bool order_matches = false;
  double max_step_error = 0.0;
  double max_equi_gap = 0.0;
  std::size_t accepted_steps = 0;
  bool passed(double tolerance) const {
    return order_matches && max_step_error <= tolerance && max_equi_gap <= tolerance;
  }
};
LarsEquivalence check_lars_equivalence(std::uint64_t seed, std::size_t n, std::size_t p,
                                       std::size_t steps);

PropertyResult check_affine_invariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                       const PipelineConfig& cfg);
PropertyResult check_permutation_equivariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                              const PipelineConfig& cfg);
PropertyResult check_intercept_invariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                          const PipelineConfig& cfg);
PropertyResult check_local_stability(std::uint64_t seed, std::size_t n, std::size_t p,
                                     const PipelineConfig& cfg, double magnitude = 1e-9);
PropertyResult check_ddc_equivariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                      double tolerance = 1e-10);

struct CellRecovery {
  std::size_t injected = 0;
  std::size_t detected = 0;
  std::size_t clean = 0;
  std::size_t false_flags = 0;
  double detection_rate() const { return injected ? double(detected) / double(injected) : 0.0; }
  double false_rate() const { return clean ? double(false_flags) / double(clean) : 0.0; }
};
CellRecovery check_cell_recovery(std::uint64_t seed, std::size_t n, std::size_t p, double alpha,
                                 double shift);

}  // namespace fscre::oracles
