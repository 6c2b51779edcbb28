#include "fscre/oracles/properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fscre/oracles/oracles.hpp"
#include "fscre/simgen.hpp"

namespace fscre::oracles {
namespace {

std::string describe(const std::vector<IndexList>& family) {
  std::ostringstream os;
  for (const auto& s : family) {
    os << '{';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
    os << '}';
  }
  return os.str();
}

struct Step {
  std::size_t model;
  Index candidate;
  bool operator==(const Step&) const = default;
};

std::vector<Step> winners(const SelectionResult& r) {
  std::vector<Step> out;
  for (const auto& rec : r.trace)
    if (rec.winner) {
      const auto& pr = rec.proposals[*rec.winner];
      out.push_back({pr.model, pr.candidate});
    }
  return out;
}

}  // namespace

Dataset generic_dataset(std::uint64_t seed, std::size_t n, std::size_t p, bool contaminated) {
  SimConfig sim;
  sim.n = n;
  sim.p = p;
  sim.sparsity = std::min<std::size_t>(10, p);
  sim.block_size = 5;
  sim.snr = 2.0;
  sim.seed = seed;
  Dataset d = generate_clean(sim);
  if (!contaminated) return d;
  ContaminationSpec spec;
  spec.scenario = Scenario::CellwiseMarginal;
  spec.alpha = 0.03;
  RandomSource rng = RandomSource(seed).child(99);
  return contaminate(d, spec, block_covariance(sim), rng);
}

SelectionRun run_foundation_and_selection(std::span<const double> y, const Matrix& x,
                                          const PipelineConfig& cfg) {
  const Matrix z = joint_matrix(y, x);
  SelectionRun run;
  run.imputation = cfg.impute ? ddc_impute(z, cfg.ddc) : passthrough_imputation(z);
  run.structure = correlation_structure(run.imputation);
  run.selection = run_selection(run.structure, run.imputation, cfg.fscre);
  return run;
}

std::vector<IndexList> canonical_family(const std::vector<IndexList>& sets) {
  std::vector<IndexList> out = sets;
  for (auto& s : out) std::sort(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

LarsEquivalence check_lars_equivalence(std::uint64_t seed, std::size_t n, std::size_t p,
                                       std::size_t steps) {
  SimConfig sim;
  sim.n = n;
  sim.p = p;
  sim.sparsity = std::min<std::size_t>(8, p);
  sim.block_size = 4;
  sim.rho_within = 0.5;
  sim.rho_background = 0.1;
  sim.snr = 2.0;
  sim.seed = seed;
  const Dataset d = generate_clean(sim);

  const OraclePath oracle = classical_lars_path(d.x, d.y, steps);

  const CorrelationStructure cs = correlation_structure(d.y, d.x);
  const ImputationResult imp = passthrough_imputation(joint_matrix(d.y, d.x));
  FscreConfig cfg;
  cfg.models = 1;
  cfg.arbitration = Arbitration::Unconditional;
  cfg.max_vars = steps;
  cfg.seed = seed;
  LarsEquivalence out;
  const SelectionResult sel = run_selection(cs, imp, cfg, [&](std::size_t, const SubModelState& s) {
    ++out.accepted_steps;
    out.max_equi_gap = std::max(out.max_equi_gap, equi_correlation_gap(s));
  });

  IndexList order;
  Vector gammas;
  for (const auto& rec : sel.trace) {
    if (!rec.winner) continue;
    order.push_back(rec.proposals[*rec.winner].candidate);
    gammas.push_back(rec.proposals[*rec.winner].gamma);
  }
  out.order_matches = order == oracle.entry_order;
  if (gammas.size() != oracle.step_sizes.size()) {
    out.max_step_error = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t k = 0; k < gammas.size(); ++k)
      out.max_step_error = std::max(out.max_step_error, std::abs(gammas[k] - oracle.step_sizes[k]));
  }
  return out;
}

PropertyResult check_affine_invariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                       const PipelineConfig& cfg) {
  const Dataset d = generic_dataset(seed, n, p, true);
  RandomSource rng = RandomSource(seed).child(7);
  auto draw_c = [&] {
    const double mag = rng.uniform(0.1, 3.0);
    return rng.bernoulli(0.5) ? mag : -mag;
  };
  Vector y = d.y;
  const double cy = draw_c(), ay = rng.uniform(-5.0, 5.0);
  for (double& v : y) v = cy * v + ay;
  Matrix x = d.x;
  for (std::size_t j = 0; j < p; ++j) {
    const double c = draw_c(), a = rng.uniform(-5.0, 5.0);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = c * x(i, j) + a;
  }
  const auto base = canonical_family(run_foundation_and_selection(d.y, d.x, cfg).selection.sets);
  const auto moved = canonical_family(run_foundation_and_selection(y, x, cfg).selection.sets);
  return {base == moved, "original " + describe(base) + " transformed " + describe(moved)};
}

PropertyResult check_permutation_equivariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                              const PipelineConfig& cfg) {
  const Dataset d = generic_dataset(seed, n, p, true);
  RandomSource rng = RandomSource(seed).child(8);
  const auto perm = rng.permutation(p);  // permuted column k holds original perm[k]
  const Matrix xp = d.x.select_columns(perm);
  const auto base = canonical_family(run_foundation_and_selection(d.y, d.x, cfg).selection.sets);
  auto sets = run_foundation_and_selection(d.y, xp, cfg).selection.sets;
  for (auto& s : sets)
    for (auto& j : s) j = perm[j];
  const auto mapped = canonical_family(sets);
  return {base == mapped, "original " + describe(base) + " permuted-back " + describe(mapped)};
}

PropertyResult check_intercept_invariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                          const PipelineConfig& cfg) {
  Dataset d = generic_dataset(seed, n, p, true);
  auto center = [](std::span<double> v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
  };
  center(d.y);
  for (std::size_t j = 0; j < p; ++j) {
    Vector c = d.x.column(j);
    center(c);
    d.x.set_column(j, c);
  }
  PipelineConfig on = cfg, off = cfg;
  on.fscre.intercept = true;
  off.fscre.intercept = false;
  const auto a = run_foundation_and_selection(d.y, d.x, on).selection;
  const auto b = run_foundation_and_selection(d.y, d.x, off).selection;
  const bool same = winners(a) == winners(b) && a.sets == b.sets;
  return {same, "with intercept " + describe(a.sets) + " without " + describe(b.sets)};
}

PropertyResult check_local_stability(std::uint64_t seed, std::size_t n, std::size_t p,
                                     const PipelineConfig& cfg, double magnitude) {
  const Dataset d = generic_dataset(seed, n, p, true);
  SelectionRun run = run_foundation_and_selection(d.y, d.x, cfg);

  RandomSource rng = RandomSource(seed).child(9);
  CorrelationStructure cs = run.structure;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      const double e = rng.uniform(-magnitude, magnitude);
      cs.r_x(i, j) += e;
      if (j != i) cs.r_x(j, i) += e;
    }
    cs.r_y[i] += rng.uniform(-magnitude, magnitude);
  }
  ImputationResult imp = run.imputation;
  for (double& v : imp.z_imp.data()) v += rng.uniform(-magnitude, magnitude);
  const SelectionResult moved = run_selection(cs, imp, cfg.fscre);

  const SelectionResult& base = run.selection;
  bool same = base.trace.size() == moved.trace.size() && base.stop_reason == moved.stop_reason &&
              winners(base) == winners(moved);
  for (std::size_t t = 0; same && t < base.trace.size(); ++t) {
    const auto& l = base.trace[t];
    const auto& r = moved.trace[t];
    same = l.stop_reason == r.stop_reason && l.proposals.size() == r.proposals.size();
    for (std::size_t k = 0; same && k < l.proposals.size(); ++k)
      same = l.proposals[k].model == r.proposals[k].model &&
             l.proposals[k].candidate == r.proposals[k].candidate;
  }
  return {same, "iterations " + std::to_string(base.trace.size()) + " vs " +
                    std::to_string(moved.trace.size()) + ", stop " + to_string(base.stop_reason) +
                    " vs " + to_string(moved.stop_reason)};
}

PropertyResult check_ddc_equivariance(std::uint64_t seed, std::size_t n, std::size_t p,
                                      double tolerance) {
  const Dataset d = generic_dataset(seed, n, p, true);
  const Matrix z = joint_matrix(d.y, d.x);
  RandomSource rng = RandomSource(seed).child(10);
  Vector c(z.cols()), a(z.cols());
  for (std::size_t j = 0; j < z.cols(); ++j) {
    const double mag = rng.uniform(0.1, 3.0);
    c[j] = rng.bernoulli(0.5) ? mag : -mag;
    a[j] = rng.uniform(-5.0, 5.0);
  }
  Matrix zt = z;
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) zt(i, j) = c[j] * z(i, j) + a[j];

  const ImputationResult base = ddc_impute(z);
  const ImputationResult moved = ddc_impute(zt);
  if (!(base.flags == moved.flags)) return {false, "flag patterns differ"};
  double worst = 0.0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) {
      const double expect = c[j] * base.z_imp(i, j) + a[j];
      worst = std::max(worst, std::abs(moved.z_imp(i, j) - expect) / (1.0 + std::abs(expect)));
    }
  }
  std::ostringstream os;
  os << "flags identical (" << base.flagged_count() << " flagged), worst relative gap " << worst;
  return {worst <= tolerance, os.str()};
}

CellRecovery check_cell_recovery(std::uint64_t seed, std::size_t n, std::size_t p, double alpha,
                                 double shift) {
  SimConfig sim;
  sim.n = n;
  sim.p = p;
  sim.sparsity = std::min<std::size_t>(sim.sparsity, p);
  sim.seed = seed;
  const Dataset clean = generate_clean(sim);
  ContaminationSpec spec;
  spec.scenario = Scenario::CellwiseMarginal;
  spec.alpha = alpha;
  spec.marginal_shift = shift;
  RandomSource rng = RandomSource(seed).child(11);
  const Dataset d = contaminate(clean, spec, block_covariance(sim), rng);
  const ImputationResult imp = ddc_impute(joint_matrix(d.y, d.x));

  CellRecovery out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= p; ++j) {
      const bool injected = j == 0 ? d.truth->mask_y[i] != 0.0 : d.truth->mask_x(i, j - 1) != 0.0;
      const bool flagged = imp.flags(i, j) != 0.0;
      if (injected) {
        ++out.injected;
        out.detected += flagged;
      } else {
        ++out.clean;
        out.false_flags += flagged;
      }
    }
  }
  return out;
}

}  // namespace fscre::oracles
