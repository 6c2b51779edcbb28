#include <fstream>
#include <ostream>

#include "fscre/errors.hpp"
#include "fscre/tools/experiment.hpp"

namespace fscre::tools {

namespace {

std::string set_names(const IndexList& set, const std::vector<std::string>& header) {
  std::string s = "{";
  for (std::size_t i = 0; i < set.size(); ++i) s += (i ? ", " : "") + header[set[i] + 1];
  return s + "}";
}

}  // namespace

EnsembleModel fit_csv(const std::string& data_path, const FitCsvOptions& opts,
                      const std::string& model_out, std::ostream& log) {
  const CsvTable table = read_csv(data_path);
  const Dataset data = dataset_from_table(table);
  if (data.n() < 10)
    throw Error(data_path + ": need at least 10 rows, found " + std::to_string(data.n()));

  FscreFit fit;
  try {
    fit = fit_fscre(data.y, data.x, opts.pipeline);
  } catch (const DegenerateColumn& e) {
    const std::size_t c = e.column();
    const std::string name = c < table.header.size() ? table.header[c] : std::to_string(c);
    throw DegenerateColumn(c, data_path + ": column '" + name +
                                  "' has zero robust scale (constant or nearly constant)");
  }
  save_model(model_out, fit.model);

  std::string summary;
  summary += "data: " + data_path + " (" + std::to_string(data.n()) + " rows, " +
             std::to_string(data.p()) + " predictors)\n";
  summary += "flagged cells: " + std::to_string(fit.imputation.flagged_count()) + "\n";
  summary += "models: " + std::to_string(fit.model.sets.size()) + "\n";
  for (std::size_t k = 0; k < fit.model.sets.size(); ++k)
    summary += "  model " + std::to_string(k + 1) + ": " +
               set_names(fit.model.sets[k], table.header) + "\n";
  summary += "trace iterations: " + std::to_string(fit.selection.trace.size()) + "\n";
  summary += "stop reason: " + to_string(fit.selection.stop_reason) + "\n";
  log << summary;
  if (!opts.summary_path.empty()) {
    std::ofstream out(opts.summary_path);
    if (!out) throw Error("cannot write " + opts.summary_path);
    out << summary;
  }
  if (!opts.trace_path.empty()) write_trace_csv(opts.trace_path, fit.selection);
  if (!opts.flags_path.empty()) write_csv(opts.flags_path, table.header, fit.imputation.flags);
  return fit.model;
}

std::size_t predict_csv(const std::string& model_path, const std::string& x_path,
                        const std::string& out_path) {
  const EnsembleModel model = load_model(model_path);
  CsvTable table = read_csv(x_path);
  Matrix x = table.values;
  // A training file with its response column is accepted as-is.
  if (!table.header.empty() && table.header[0] == "y") {
    IndexList cols;
    for (std::size_t j = 1; j < x.cols(); ++j) cols.push_back(j);
    x = x.select_columns(cols);
  }
  if (x.cols() != model.p)
    throw ShapeMismatch(x_path + ": model expects " + std::to_string(model.p) +
                        " predictor columns, found " + std::to_string(x.cols()));
  const Vector y_hat = predict(model, x);
  Matrix out(y_hat.size(), 1);
  for (std::size_t i = 0; i < y_hat.size(); ++i) out(i, 0) = y_hat[i];
  write_csv(out_path, {"y_hat"}, out);
  return y_hat.size();
}

void simulate_csv(const ExperimentConfig& cfg, const std::string& data_path,
                  const std::string& mask_path) {
  cfg.sim.validate();
  cfg.contamination.validate();
  SimConfig sim = cfg.sim;
  sim.seed = mix_seed(cfg.seed, 0);
  const Dataset clean = generate_clean(sim);
  RandomSource rng = RandomSource(sim.seed).child(5);
  const Dataset data = contaminate(clean, cfg.contamination, block_covariance(sim), rng);
  write_dataset_csv(data_path, data);
  if (!mask_path.empty()) write_mask_csv(mask_path, data);
}

}  // namespace fscre::tools
