#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fscre/errors.hpp"
#include "fscre/tools/experiment.hpp"

namespace fscre::tools {

using nlohmann::json;

namespace {

const std::vector<std::pair<Mode, const char*>> kModes = {
    {Mode::Fit, "fit"},
    {Mode::SweepK, "sweep-k"},
    {Mode::SweepContamination, "sweep-contamination"},
    {Mode::Benchmark, "benchmark"},
    {Mode::Selftest, "selftest"},
};

// Field readers: each names the full path of the field on failure.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidConfig("config: '" + path_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& out) const {
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!it->is_number()) throw InvalidConfig("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw InvalidConfig("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw InvalidConfig("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_unsigned()) throw InvalidConfig("");
      }
      out = it->get<T>();
    } catch (const std::exception&) {
      throw InvalidConfig("config: field '" + name(key) + "' has the wrong type (found " +
                          std::string(it->type_name()) + ")");
    }
  }

  void reject_unknown(std::initializer_list<const char*> known) const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* k : known) ok = ok || it.key() == k;
      if (!ok) throw InvalidConfig("config: unknown field '" + name(it.key().c_str()) + "'");
    }
  }

  const json* child(const char* key) const {
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }
  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
};

ContaminationSpec read_contamination(const json& j, const std::string& path,
                                     ContaminationSpec spec) {
  Reader r(j, path);
  r.reject_unknown({"scenario", "alpha", "alpha2", "leverage_c", "marginal_shift", "gamma_corr",
                    "beta_distort"});
  std::string scenario = to_string(spec.scenario);
  r.get("scenario", scenario);
  try {
    spec.scenario = scenario_from_string(scenario);
  } catch (const InvalidConfig& e) {
    throw InvalidConfig("config: field '" + r.name("scenario") + "': " + e.what());
  }
  r.get("alpha", spec.alpha);
  r.get("alpha2", spec.alpha2);
  r.get("leverage_c", spec.leverage_c);
  r.get("marginal_shift", spec.marginal_shift);
  r.get("gamma_corr", spec.gamma_corr);
  r.get("beta_distort", spec.beta_distort);
  return spec;
}

template <class T>
std::vector<T> read_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw InvalidConfig("config: field '" + path + "' must be an array");
  std::vector<T> out;
  for (const auto& v : j) {
    if (!v.is_number_unsigned())
      throw InvalidConfig("config: field '" + path + "' must hold non-negative integers");
    out.push_back(v.get<T>());
  }
  return out;
}

json contamination_json(const ContaminationSpec& c) {
  return {{"scenario", to_string(c.scenario)}, {"alpha", c.alpha},
          {"alpha2", c.alpha2},                {"leverage_c", c.leverage_c},
          {"marginal_shift", c.marginal_shift}, {"gamma_corr", c.gamma_corr},
          {"beta_distort", c.beta_distort}};
}

}  // namespace

std::string to_string(Mode m) {
  for (const auto& [mode, name] : kModes)
    if (mode == m) return name;
  return "unknown";
}

Mode mode_from_string(const std::string& s) {
  for (const auto& [mode, name] : kModes)
    if (s == name) return mode;
  throw InvalidConfig("unknown mode '" + s +
                      "' (expected fit, sweep-k, sweep-contamination, benchmark or selftest)");
}

ExperimentConfig::ExperimentConfig() {
  for (std::size_t k = 1; k <= 20; ++k) sweep_k.push_back(k);
  sweep_contamination = {
      {Scenario::Casewise, 0.1, 0.0},           {Scenario::Casewise, 0.2, 0.0},
      {Scenario::CellwiseMarginal, 0.05, 0.0},  {Scenario::CellwiseMarginal, 0.1, 0.0},
      {Scenario::CellwiseCorrelation, 0.05, 0.0}, {Scenario::CellwiseCorrelation, 0.1, 0.0},
      {Scenario::MixtureMarginal, 0.1, 0.05},   {Scenario::MixtureCorrelation, 0.1, 0.05},
  };
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw InvalidConfig("config: replications must be at least 1");
  if (test_size < 1) throw InvalidConfig("config: test_size must be at least 1");
  if (threads < 1) throw InvalidConfig("config: threads must be at least 1");
  if (mode == Mode::Selftest) return;
  sim.validate();
  if (sim.sparsity < 1)
    throw InvalidConfig("config: sim.sparsity must be at least 1 for recall to be defined");
  contamination.validate();
  if (mode != Mode::Benchmark) fscre.validate(sim.n, sim.p);
  if (mode == Mode::SweepK) {
    if (sweep_k.empty()) throw InvalidConfig("config: sweep_k is empty");
    for (std::size_t k : sweep_k)
      if (k < 1) throw InvalidConfig("config: sweep_k entries must be at least 1");
  }
  if (mode == Mode::SweepContamination) {
    if (sweep_contamination.empty()) throw InvalidConfig("config: sweep_contamination is empty");
    for (const auto& c : sweep_contamination) c.validate();
  }
  if (mode == Mode::Benchmark && (bench_n.empty() || bench_p.empty()))
    throw InvalidConfig("config: benchmark.n and benchmark.p must be non-empty");
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C" in its message.
    throw InvalidConfig(std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  Reader r(j, "");
  r.reject_unknown({"mode", "seed", "replications", "test_size", "output", "threads", "impute",
                    "sim", "contamination", "fscre", "sweep_k", "sweep_contamination",
                    "benchmark"});
  std::string mode = to_string(cfg.mode);
  r.get("mode", mode);
  cfg.mode = mode_from_string(mode);
  r.get("seed", cfg.seed);
  r.get("replications", cfg.replications);
  r.get("test_size", cfg.test_size);
  r.get("output", cfg.output_path);
  r.get("threads", cfg.threads);
  r.get("impute", cfg.impute);

  if (const json* s = r.child("sim")) {
    Reader rs(*s, "sim");
    rs.reject_unknown({"n", "p", "sparsity", "snr", "block_size", "rho_within", "rho_background",
                       "coef_low", "coef_high"});
    rs.get("n", cfg.sim.n);
    rs.get("p", cfg.sim.p);
    rs.get("sparsity", cfg.sim.sparsity);
    rs.get("snr", cfg.sim.snr);
    rs.get("block_size", cfg.sim.block_size);
    rs.get("rho_within", cfg.sim.rho_within);
    rs.get("rho_background", cfg.sim.rho_background);
    rs.get("coef_low", cfg.sim.coef_low);
    rs.get("coef_high", cfg.sim.coef_high);
  }
  if (const json* c = r.child("contamination"))
    cfg.contamination = read_contamination(*c, "contamination", cfg.contamination);
  if (const json* f = r.child("fscre")) {
    Reader rf(*f, "fscre");
    rf.reject_unknown({"models", "tau", "cv_folds", "max_vars", "intercept"});
    rf.get("models", cfg.fscre.models);
    rf.get("tau", cfg.fscre.tau);
    rf.get("cv_folds", cfg.fscre.cv_folds);
    rf.get("intercept", cfg.fscre.intercept);
    if (rf.child("max_vars")) {
      std::size_t k = 0;
      rf.get("max_vars", k);
      cfg.fscre.max_vars = k;
    }
  }
  if (const json* k = r.child("sweep_k")) cfg.sweep_k = read_list<std::size_t>(*k, "sweep_k");
  if (const json* c = r.child("sweep_contamination")) {
    if (!c->is_array()) throw InvalidConfig("config: field 'sweep_contamination' must be an array");
    cfg.sweep_contamination.clear();
    for (std::size_t i = 0; i < c->size(); ++i)
      cfg.sweep_contamination.push_back(read_contamination(
          (*c)[i], "sweep_contamination[" + std::to_string(i) + "]", ContaminationSpec{}));
  }
  if (const json* b = r.child("benchmark")) {
    Reader rb(*b, "benchmark");
    rb.reject_unknown({"n", "p"});
    if (const json* n = rb.child("n")) cfg.bench_n = read_list<std::size_t>(*n, "benchmark.n");
    if (const json* p = rb.child("p")) cfg.bench_p = read_list<std::size_t>(*p, "benchmark.p");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const InvalidConfig& e) {
    throw InvalidConfig(path + ": " + e.what());
  }
}

std::string config_json(const ExperimentConfig& cfg) {
  json j;
  j["mode"] = to_string(cfg.mode);
  j["seed"] = cfg.seed;
  j["replications"] = cfg.replications;
  j["test_size"] = cfg.test_size;
  j["impute"] = cfg.impute;
  j["sim"] = {{"n", cfg.sim.n},
              {"p", cfg.sim.p},
              {"sparsity", cfg.sim.sparsity},
              {"snr", cfg.sim.snr},
              {"block_size", cfg.sim.block_size},
              {"rho_within", cfg.sim.rho_within},
              {"rho_background", cfg.sim.rho_background},
              {"coef_low", cfg.sim.coef_low},
              {"coef_high", cfg.sim.coef_high}};
  j["contamination"] = contamination_json(cfg.contamination);
  j["fscre"] = {{"models", cfg.fscre.models},
                {"tau", cfg.fscre.tau},
                {"cv_folds", cfg.fscre.cv_folds},
                {"intercept", cfg.fscre.intercept}};
  j["fscre"]["max_vars"] = cfg.fscre.max_vars ? json(*cfg.fscre.max_vars) : json(nullptr);
  switch (cfg.mode) {
    case Mode::SweepK: j["sweep_k"] = cfg.sweep_k; break;
    case Mode::SweepContamination: {
      json list = json::array();
      for (const auto& c : cfg.sweep_contamination) list.push_back(contamination_json(c));
      j["sweep_contamination"] = list;
      break;
    }
    case Mode::Benchmark: j["benchmark"] = {{"n", cfg.bench_n}, {"p", cfg.bench_p}}; break;
    default: break;
  }
  return j.dump();
}

}  // namespace fscre::tools
