#pragma once

#include "fscre/ensemble.hpp"
#include "fscre/foundation.hpp"
#include "fscre/robustfit.hpp"

namespace fscre {

struct PipelineConfig {
  FscreConfig fscre;
  DdcConfig ddc;
  bool impute = true;  // false: skip cell detection (ablation)
  MmConfig mm;
};

struct FscreFit {
  ImputationResult imputation;
  CorrelationStructure structure;
  SelectionResult selection;
  EnsembleModel model;
};

// Foundation -> competitive selection -> per-model MM fits.
FscreFit fit_fscre(std::span<const double> y, const Matrix& x, const PipelineConfig& cfg);

// MM fit of every selected set on the imputed data.
EnsembleModel fit_ensemble(const ImputationResult& imp, const SelectionResult& selection,
                           const PipelineConfig& cfg);

}  // namespace fscre
