#include "manyiv/inference.hpp"

#include <cmath>

#include "manyiv/dataset.hpp"
#include "manyiv/errors.hpp"
#include "manyiv/parallel.hpp"

namespace manyiv {

std::vector<HypothesisGrid::Point> HypothesisGrid::points() const {
  if (gf_step <= 0.0 || lam_step <= 0.0)
    throw config_error("hypothesis grid: steps must be positive");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(gf_count()) *
              static_cast<std::size_t>(lam_count()));
  for (int i = 0; i < gf_count(); ++i)
    for (int j = 0; j < lam_count(); ++j)
      pts.push_back({gf_min + i * gf_step, lam_min + j * lam_step});
  return pts;
}

int HypothesisGrid::gf_count() const {
  return static_cast<int>(std::floor((gf_max - gf_min) / gf_step + 1e-9)) + 1;
}

int HypothesisGrid::lam_count() const {
  return static_cast<int>(std::floor((lam_max - lam_min) / lam_step + 1e-9)) + 1;
}

std::string method_name(Method method) {
  switch (method) {
    case Method::OracleS: return "oracle";
    case Method::RandomS: return "random";
    case Method::CrudeS: return "crude";
    case Method::LassoS: return "lasso";
    case Method::SupScore: return "supscore";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "oracle") return Method::OracleS;
  if (name == "random") return Method::RandomS;
  if (name == "crude") return Method::CrudeS;
  if (name == "lasso") return Method::LassoS;
  if (name == "supscore") return Method::SupScore;
  throw config_error("unknown method '" + name +
                     "' (want oracle|random|crude|lasso|supscore)");
}

double MethodFrequency::rf_se() const {
  if (n == 0) return 0.0;
  double p = rf();
  return std::sqrt(p * (1.0 - p) / n);
}

std::size_t ConfidenceGrid::in_set_count() const {
  std::size_t count = 0;
  for (bool b : mask) count += b ? 1 : 0;
  return count;
}

namespace {

// A method bound to one dataset: the problem to test on, the instruments
// selected for it, and the S configuration with concentration resolved.
struct BoundMethod {
  EstimationProblem problem;
  std::vector<int> selected;  // S methods only
  SStatConfig s;
  bool is_supscore = false;
};

BoundMethod bind_method(const EstimationProblem& problem,
                        const SimulatedDataset* sim, const MethodConfig& config,
                        Rng selection_rng) {
  BoundMethod bound;
  bound.s = config.s;
  if (config.method == Method::SupScore) {
    bound.is_supscore = true;
    bound.problem = partial_out_problem(problem);
    return bound;
  }

  if (config.method == Method::OracleS) {
    if (!sim)
      throw config_error("oracle method requires a simulated dataset");
    bound.problem = problem;
    bound.problem.Z = sim->oracle_Z;
    bound.problem.labels = sim->oracle_labels;
    bound.selected.resize(sim->oracle_labels.size());
    for (std::size_t j = 0; j < bound.selected.size(); ++j)
      bound.selected[j] = static_cast<int>(j);
  } else {
    bound.problem = problem;
    SelectionSpec spec = config.selection;
    switch (config.method) {
      case Method::RandomS: spec.method = SelectionMethod::Random; break;
      case Method::CrudeS: spec.method = SelectionMethod::CrudeThreshold; break;
      case Method::LassoS: spec.method = SelectionMethod::Lasso; break;
      default: break;
    }
    if (config.method == Method::CrudeS && sim && sim->selection_basis.size()) {
      // Crude thresholding on simulated data ranks the factor-panel columns
      // against the level-form endogenous basis, with the constant and the
      // traditional instruments (pi_{t-1}, s_{t-1}) partialled out of both
      // sides. The traditional columns themselves are degenerate after
      // partialling and stay out of the ranked pool.
      const auto T = problem.T();
      Matrix X_sel(T, 3);
      X_sel.col(0).setOnes();
      X_sel.col(1) = sim->oracle_Z.col(0);
      X_sel.col(2) = sim->oracle_Z.col(1);
      const Eigen::Index n_trad = 2;
      Matrix basis = partial_out(sim->selection_basis, X_sel);
      Matrix pool =
          partial_out(problem.Z.rightCols(problem.k() - n_trad), X_sel);
      auto picked = select_crude_threshold(basis, pool, spec);
      for (int idx : picked)
        bound.selected.push_back(idx + static_cast<int>(n_trad));
    } else {
      bound.selected =
          select_instruments(problem.Y, problem.Z, spec, selection_rng);
    }
  }

  // exogenous coefficients: partialled problems need nothing, otherwise
  // every X column is concentrated out of the CUE objective
  bound.s.concentrate.clear();
  if (!bound.problem.partialled)
    bound.s.concentrate = bound.problem.x_labels;
  return bound;
}

Vector theta_at(const HypothesisGrid::Point& pt) {
  Vector theta(2);
  theta << pt.lambda, pt.gamma_f;  // Y columns are (s_t, lead term)
  return theta;
}

}  // namespace

bool two_step_rejection(const EstimationProblem& problem,
                        const std::vector<int>& selected, const Vector& theta0,
                        const SStatConfig& config) {
  TestResult overid = robust_overid(problem, selected, config);
  if (overid.reject) return false;
  return s_test(problem, selected, theta0, config).reject;
}

ConfidenceGrid invert_test(const EstimationProblem& problem,
                           const SimulatedDataset* oracle,
                           const HypothesisGrid& grid,
                           const MethodConfig& config, std::uint64_t seed) {
  if (problem.p1() != 2)
    throw config_error("invert_test: grid inversion expects two endogenous "
                       "coefficients (lambda, gamma_f)");
  Rng root(seed);
  BoundMethod bound = bind_method(problem, oracle, config, root.derive(1));

  ConfidenceGrid out;
  out.grid = grid;
  out.method = method_name(config.method);
  out.selected = bound.selected;
  for (int idx : bound.selected)
    out.selected_labels.push_back(
        idx < static_cast<int>(bound.problem.labels.size())
            ? bound.problem.labels[static_cast<std::size_t>(idx)]
            : "col" + std::to_string(idx));

  const auto pts = grid.points();
  out.results.resize(pts.size());
  out.mask.assign(pts.size(), true);

  Rng boot_root = root.derive(2);
  parallel_for(pts.size(), config.workers, [&](std::size_t i) {
    Vector theta0 = theta_at(pts[i]);
    PointOutcome& slot = out.results[i];
    try {
      if (bound.is_supscore) {
        SupScoreConfig ss = config.supscore;
        ss.rng_seed = boot_root.substream_seed(i);
        ss.workers = 1;
        SupScoreOutcome o = sup_score_test(bound.problem, theta0, ss);
        slot.result.statistic = o.statistic;
        slot.result.critical_value = o.critical_value;
        slot.result.reject = o.reject;
        slot.result.alpha = o.alpha;
        slot.result.method = "supscore:bootstrap";
        slot.result.argmax_label = o.argmax_label;
      } else {
        slot.result = s_test(bound.problem, bound.selected, theta0, bound.s);
      }
    } catch (const numerical_error& err) {
      slot.failed = true;
      slot.error = err.what();
      slot.result.reject = false;
    }
    out.mask[i] = !slot.result.reject;
  });
  return out;
}

namespace {

struct RepOutcome {
  bool reject = false;
  bool ts_reject = false;
  bool failed = false;
};

}  // namespace

CampaignResult monte_carlo_size(const DgpCalibration& calib,
                                const CampaignConfig& config) {
  if (config.nrep < 1) throw config_error("monte_carlo_size: nrep must be >= 1");
  CampaignResult out;
  out.calib = calib;
  out.nrep = config.nrep;
  {
    ConcentrationReport rep = concentration_observed(calib);
    out.mu2_oracle = rep.mu2_oracle;
    out.mu2_observed = rep.mu2_observed;
  }

  const std::size_t n_methods = config.methods.size();
  std::vector<RepOutcome> cells(static_cast<std::size_t>(config.nrep) * n_methods);
  Rng master(config.master_seed);

  Vector theta_true(2);
  theta_true << calib.lambda, calib.gamma_f;

  parallel_for(static_cast<std::size_t>(config.nrep), config.workers,
               [&](std::size_t r) {
    Rng rep_rng = master.derive(r);
    SimulatedDataset data = simulate_dataset(calib, rep_rng.derive(0));
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      RepOutcome& cell = cells[r * n_methods + mi];
      MethodConfig mc;
      mc.method = config.methods[mi];
      mc.s = config.s;
      mc.s.alpha = config.alpha;
      mc.supscore = config.supscore;
      mc.supscore.alpha = config.alpha;
      mc.selection = config.selection;
      try {
        BoundMethod bound =
            bind_method(data.problem, &data, mc, rep_rng.derive(1));
        if (bound.is_supscore) {
          SupScoreConfig ss = mc.supscore;
          ss.rng_seed = rep_rng.derive(2).substream_seed(0);
          ss.workers = 1;
          cell.reject =
              sup_score_test(bound.problem, theta_true, ss).reject;
        } else {
          cell.reject =
              s_test(bound.problem, bound.selected, theta_true, bound.s).reject;
          if (config.with_two_step)
            cell.ts_reject = !robust_overid(bound.problem, bound.selected,
                                            bound.s).reject &&
                             cell.reject;
        }
      } catch (const numerical_error&) {
        cell.failed = true;
        cell.reject = false;
        cell.ts_reject = false;
      }
    }
  });

  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    MethodFrequency freq;
    freq.method = method_name(config.methods[mi]);
    freq.n = config.nrep;
    freq.has_two_step =
        config.with_two_step && config.methods[mi] != Method::SupScore;
    for (int r = 0; r < config.nrep; ++r) {
      const RepOutcome& cell = cells[static_cast<std::size_t>(r) * n_methods + mi];
      freq.rejections += cell.reject ? 1 : 0;
      freq.ts_rejections += cell.ts_reject ? 1 : 0;
      freq.failures += cell.failed ? 1 : 0;
    }
    if (freq.failures * 100 > config.nrep)
      throw numerical_error("monte_carlo_size: method " + freq.method +
                            " failed in " + std::to_string(freq.failures) +
                            " of " + std::to_string(config.nrep) +
                            " replications (> 1%)");
    out.methods.push_back(freq);
  }
  return out;
}

std::vector<PowerPoint> monte_carlo_power(const DgpCalibration& calib,
                                          Method method,
                                          const HypothesisGrid& grid,
                                          const CampaignConfig& config) {
  if (config.nrep < 1)
    throw config_error("monte_carlo_power: nrep must be >= 1");
  const auto pts = grid.points();
  std::vector<std::vector<unsigned char>> rejects(
      static_cast<std::size_t>(config.nrep));
  std::vector<std::vector<unsigned char>> fails(
      static_cast<std::size_t>(config.nrep));
  Rng master(config.master_seed);

  parallel_for(static_cast<std::size_t>(config.nrep), config.workers,
               [&](std::size_t r) {
    rejects[r].assign(pts.size(), 0);
    fails[r].assign(pts.size(), 0);
    Rng rep_rng = master.derive(r);
    SimulatedDataset data = simulate_dataset(calib, rep_rng.derive(0));
    MethodConfig mc;
    mc.method = method;
    mc.s = config.s;
    mc.s.alpha = config.alpha;
    mc.supscore = config.supscore;
    mc.supscore.alpha = config.alpha;
    mc.selection = config.selection;
    BoundMethod bound = bind_method(data.problem, &data, mc, rep_rng.derive(1));
    Rng boot_root = rep_rng.derive(2);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Vector theta0 = theta_at(pts[i]);
      try {
        bool reject;
        if (bound.is_supscore) {
          SupScoreConfig ss = mc.supscore;
          ss.rng_seed = boot_root.substream_seed(i);
          ss.workers = 1;
          reject = sup_score_test(bound.problem, theta0, ss).reject;
        } else {
          reject = s_test(bound.problem, bound.selected, theta0, bound.s).reject;
        }
        rejects[r][i] = reject ? 1 : 0;
      } catch (const numerical_error&) {
        fails[r][i] = 1;
      }
    }
  });

  std::vector<PowerPoint> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[i].gamma_f = pts[i].gamma_f;
    out[i].lambda = pts[i].lambda;
    out[i].n = config.nrep;
    for (int r = 0; r < config.nrep; ++r) {
      out[i].rejections += rejects[static_cast<std::size_t>(r)][i];
      out[i].failures += fails[static_cast<std::size_t>(r)][i];
    }
  }
  return out;
}

}  // namespace manyiv
