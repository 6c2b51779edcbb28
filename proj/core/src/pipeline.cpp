#include "fscre/pipeline.hpp"

#include "fscre/random.hpp"

namespace fscre {

EnsembleModel fit_ensemble(const ImputationResult& imp, const SelectionResult& selection,
                           const PipelineConfig& cfg) {
  EnsembleModel model;
  model.p = imp.p();
  model.intercept = cfg.fscre.intercept;
  model.sets = selection.sets;
  const Vector y = imp.y();
  const Matrix x = imp.x();
  for (std::size_t k = 0; k < selection.sets.size(); ++k) {
    MmConfig mm = cfg.mm;
    mm.seed = mix_seed(cfg.fscre.seed, 1000 + k);
    model.fits.push_back(mm_fit(x.select_columns(selection.sets[k]), y, cfg.fscre.intercept, mm));
  }
  return model;
}

FscreFit fit_fscre(std::span<const double> y, const Matrix& x, const PipelineConfig& cfg) {
  const Matrix z = joint_matrix(y, x);
  FscreFit fit;
  fit.imputation = cfg.impute ? ddc_impute(z, cfg.ddc) : passthrough_imputation(z);
  fit.structure = correlation_structure(fit.imputation);
  fit.selection = run_selection(fit.structure, fit.imputation, cfg.fscre);
  fit.model = fit_ensemble(fit.imputation, fit.selection, cfg);
  return fit;
}

}  // namespace fscre
