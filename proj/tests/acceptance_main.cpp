// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Deterministic: every statistical criterion runs under a fixed master seed.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "manyiv/chi_square.hpp"
#include "manyiv/dataset.hpp"
#include "manyiv/errors.hpp"
#include "manyiv/gmm_s.hpp"
#include "manyiv/hac.hpp"
#include "manyiv/inference.hpp"
#include "manyiv/nkpc.hpp"
#include "manyiv/parallel.hpp"
#include "manyiv/selection.hpp"
#include "manyiv/supscore.hpp"

using namespace manyiv;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << name;
  if (!detail.empty()) std::cout << " -- " << detail;
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

void report_skip(const std::string& name, const std::string& why) {
  std::cout << "[SKIP] " << name << " -- " << why << std::endl;
}

double binomial_se(double p, int n) { return std::sqrt(p * (1.0 - p) / n); }

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.normal();
  return m;
}

Vector random_vector(Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

// ---------------------------------------------------------------------------
// Criterion 1: concentration-parameter golden suite, all 27 cells of the
// calibration table within +-0.01, under one second.

struct GoldenCell {
  double a21, a22, a23, mu2_oracle, mu2_observed;
};

const std::vector<GoldenCell>& golden_cells() {
  static const std::vector<GoldenCell> cells = {
      {0.00, 0.00, 0.00, 0.000, 0.000},   {0.00, 0.20, 0.00, 4.082, 4.082},
      {0.00, 0.45, 0.00, 24.175, 24.175}, {0.20, 0.00, 0.00, 0.000, 0.000},
      {0.20, 0.20, 0.00, 4.070, 4.070},   {0.20, 0.45, 0.00, 23.938, 23.938},
      {0.45, 0.00, 0.00, 0.000, 0.000},   {0.45, 0.20, 0.00, 4.040, 4.040},
      {0.45, 0.45, 0.00, 23.393, 23.393}, {0.00, 0.00, 0.20, 11.198, 6.638},
      {0.00, 0.20, 0.20, 19.501, 14.262}, {0.00, 0.45, 0.20, 48.211, 38.910},
      {0.20, 0.00, 0.20, 12.137, 7.144},  {0.20, 0.20, 0.20, 21.030, 15.044},
      {0.20, 0.45, 0.20, 49.983, 38.117}, {0.45, 0.00, 0.20, 13.431, 7.827},
      {0.45, 0.20, 0.20, 23.283, 16.092}, {0.45, 0.45, 0.20, 53.527, 36.214},
      {0.00, 0.00, 0.45, 56.388, 29.100}, {0.00, 0.20, 0.45, 81.202, 42.505},
      {0.00, 0.45, 0.45, 101.025, 52.008},{0.20, 0.00, 0.45, 61.410, 30.144},
      {0.20, 0.20, 0.45, 83.525, 41.690}, {0.20, 0.45, 0.45, 101.183, 47.471},
      {0.45, 0.00, 0.45, 66.590, 31.006}, {0.45, 0.20, 0.45, 83.989, 40.080},
      {0.45, 0.45, 0.45, 107.289, 42.374}};
  return cells;
}

void criterion_concentration_golden() {
  auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::string worst_cell;
  for (const auto& cell : golden_cells()) {
    DgpCalibration calib;
    calib.a21 = cell.a21;
    calib.a22 = cell.a22;
    calib.a23 = cell.a23;
    auto rep = concentration_observed(calib);
    double err = std::max(std::abs(rep.mu2_oracle - cell.mu2_oracle),
                          std::abs(rep.mu2_observed - cell.mu2_observed));
    if (err > worst) {
      worst = err;
      std::ostringstream os;
      os << "(" << cell.a21 << "," << cell.a22 << "," << cell.a23 << ")";
      worst_cell = os.str();
    }
  }
  double seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  os << "27 cells, max |error| = " << worst << " at " << worst_cell << ", "
     << seconds << "s";
  report("C1 concentration golden suite (+-0.01, <1s)",
         worst <= 0.01 && seconds < 1.0, os.str());
}

// ---------------------------------------------------------------------------
// Criteria 2 and 3: size reproduction at 500 replications and the
// overid-gated two-step, on the (0,0) and (0.45,0.45) corners of each panel.

struct SizeCell {
  double a21, a22, a23;
  double oracle, random_rf, crude, lasso, sup, crude_ts;
};

void criteria_size_and_two_step() {
  const std::vector<SizeCell> cells = {
      {0.00, 0.00, 0.00, 0.070, 0.107, 0.445, 0.199, 0.030, 0.200},
      {0.45, 0.45, 0.00, 0.046, 0.135, 0.440, 0.230, 0.033, 0.150},
      {0.00, 0.00, 0.20, 0.059, 0.108, 0.413, 0.188, 0.024, 0.176},
      {0.45, 0.45, 0.20, 0.056, 0.129, 0.405, 0.195, 0.026, 0.219},
      {0.00, 0.00, 0.45, 0.084, 0.107, 0.372, 0.201, 0.016, 0.186},
      {0.45, 0.45, 0.45, 0.087, 0.122, 0.398, 0.212, 0.037, 0.292}};
  const int nrep = 500;

  bool oracle_ok = true, random_ok = true, crude_ok = true, lasso_ok = true,
       sup_ok = true, ts_order_ok = true, crude_ts_ok = true;
  std::ostringstream oracle_d, random_d, crude_d, lasso_d, sup_d, ts_d;

  for (const auto& cell : cells) {
    DgpCalibration calib;
    calib.a21 = cell.a21;
    calib.a22 = cell.a22;
    calib.a23 = cell.a23;
    CampaignConfig cfg;
    cfg.nrep = nrep;
    cfg.alpha = 0.10;
    cfg.master_seed = 20260810;
    cfg.workers = default_workers();
    auto t0 = std::chrono::steady_clock::now();
    auto res = monte_carlo_size(calib, cfg);
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0).count();
    std::cerr << "  size cell (" << cell.a21 << "," << cell.a22 << ","
              << cell.a23 << ") done in " << secs << "s" << std::endl;

    std::map<std::string, const MethodFrequency*> by_name;
    for (const auto& m : res.methods) by_name[m.method] = &m;

    double rf;
    rf = by_name["oracle"]->rf();
    if (std::abs(rf - cell.oracle) > 3.0 * binomial_se(cell.oracle, nrep))
      oracle_ok = false;
    oracle_d << " " << rf << "/" << cell.oracle;

    rf = by_name["random"]->rf();
    {
      double lo = 0.100 - 3.0 * binomial_se(0.100, nrep);
      double hi = 0.135 + 3.0 * binomial_se(0.135, nrep);
      if (rf < lo || rf > hi) random_ok = false;
      random_d << " " << rf;
    }

    rf = by_name["crude"]->rf();
    if (rf < 0.30) crude_ok = false;
    crude_d << " " << rf << "/" << cell.crude;

    rf = by_name["lasso"]->rf();
    if (rf < 0.12 || rf > 0.30) lasso_ok = false;
    lasso_d << " " << rf;

    rf = by_name["supscore"]->rf();
    if (rf > 0.06) sup_ok = false;
    sup_d << " " << rf;

    for (const auto& m : res.methods)
      if (m.has_two_step && m.ts_rejections > m.rejections) ts_order_ok = false;

    double ts = by_name["crude"]->ts();
    if (ts < 0.14 - 3.0 * binomial_se(0.14, nrep)) crude_ts_ok = false;
    ts_d << " " << ts << "/" << cell.crude_ts;
  }

  report("C2 oracle-S size within 3 s.e. of each cell value",
         oracle_ok, "rf/paper:" + oracle_d.str());
  report("C2 random-S size within 3 s.e. of the 0.100-0.135 band",
         random_ok, "rf:" + random_d.str());
  report("C2 crude-thresholding-S size >= 0.30", crude_ok,
         "rf/paper:" + crude_d.str());
  report("C2 LASSO-S size in [0.12, 0.30]", lasso_ok, "rf:" + lasso_d.str());
  report("C2 Sup Score size <= 0.06", sup_ok, "rf:" + sup_d.str());
  report("C3 two-step T.S. <= R.F. in every cell", ts_order_ok, "");
  report("C3 crude-thresholding T.S. >= 0.14 within 3 s.e.", crude_ts_ok,
         "ts/paper:" + ts_d.str());
}

// ---------------------------------------------------------------------------
// Criterion 4: Sup Score power at distant alternatives.

void criterion_supscore_power() {
  DgpCalibration calib;
  calib.a21 = 0.45;
  calib.a22 = 0.45;
  calib.a23 = 0.45;
  CampaignConfig cfg;
  cfg.nrep = 1000;
  cfg.alpha = 0.10;
  cfg.master_seed = 31415926;
  cfg.workers = default_workers();
  HypothesisGrid grid;
  grid.gf_min = 0.2;
  grid.gf_max = 1.4;
  grid.gf_step = 0.6;
  grid.lam_min = 0.05;
  grid.lam_max = 0.05;
  grid.lam_step = 1.0;
  auto pts = monte_carlo_power(calib, Method::SupScore, grid, cfg);
  double at_truth = 0.0, lo = 0.0, hi = 0.0;
  for (const auto& p : pts) {
    double rate = double(p.rejections) / p.n;
    if (std::abs(p.gamma_f - 0.8) < 1e-9) at_truth = rate;
    else if (p.gamma_f < 0.8) lo = rate;
    else hi = rate;
  }
  std::ostringstream os;
  os << "reject(0.2)=" << lo << " reject(0.8)=" << at_truth
     << " reject(1.4)=" << hi;
  report("C4 Sup Score power exceeds size by >= 0.05 at gamma_f = 0.8 +- 0.6",
         lo >= at_truth + 0.05 && hi >= at_truth + 0.05, os.str());
}

// ---------------------------------------------------------------------------
// Criterion 5: oracle-equivalence micro-suite, >= 20 randomized instances
// per operation against an independent route.

double s_statistic_direct(const Matrix& Zs, const Vector& eps0, int L) {
  const auto T = Zs.rows();
  const auto k = Zs.cols();
  Matrix m(T, k);
  for (Eigen::Index t = 0; t < T; ++t) m.row(t) = Zs.row(t) * eps0[t];
  Vector mbar = m.colwise().mean();
  Matrix S = Matrix::Zero(k, k);
  for (int l = 0; l <= L; ++l) {
    Matrix G = Matrix::Zero(k, k);
    for (Eigen::Index t = l; t < T; ++t)
      G += (m.row(t).transpose() - mbar) *
           (m.row(t - l).transpose() - mbar).transpose();
    G /= double(T);
    if (l == 0) S += G;
    else S += (1.0 - double(l) / (L + 1)) * (G + G.transpose());
  }
  return double(T) * mbar.dot(S.inverse() * mbar);
}

void criterion_micro_oracles() {
  Rng rng(271828);

  // S statistic vs the spreadsheet-style direct evaluation
  {
    bool ok = true;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      int T = 10 + static_cast<int>(rng.uniform_int(40));
      int k = 1 + static_cast<int>(rng.uniform_int(3));
      int L = static_cast<int>(rng.uniform_int(5));
      Matrix Zs = random_matrix(rng, T, k);
      Vector eps = random_vector(rng, T);
      SStatConfig config;
      config.hac_lag = L;
      double fast = s_statistic(Zs, eps, config);
      double slow = s_statistic_direct(Zs, eps, L);
      double err = std::abs(fast - slow) / std::max(1.0, std::abs(slow));
      worst = std::max(worst, err);
      if (err > 1e-8) ok = false;
    }
    report("C5 S statistic matches its brute-force oracle (20 instances)", ok,
           "max rel err " + std::to_string(worst));
  }

  // HAC vs explicit double loops
  {
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      int T = 8 + static_cast<int>(rng.uniform_int(40));
      int k = 1 + static_cast<int>(rng.uniform_int(4));
      int L = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(T - 1)));
      Matrix m = random_matrix(rng, T, k);
      Vector mean = m.colwise().mean();
      Matrix S = Matrix::Zero(k, k);
      for (int l = 0; l <= L; ++l) {
        Matrix G = Matrix::Zero(k, k);
        for (int t = l; t < T; ++t)
          G += (m.row(t).transpose() - mean) *
               (m.row(t - l).transpose() - mean).transpose();
        G /= double(T);
        if (l == 0) S += G;
        else S += (1.0 - double(l) / (L + 1)) * (G + G.transpose());
      }
      Matrix fast = hac_covariance({m, L});
      if ((fast - S).cwiseAbs().maxCoeff() > 1e-10) ok = false;
    }
    report("C5 HAC matches its brute-force oracle (20 instances)", ok, "");
  }

  // LASSO vs soft-threshold closed form on in-sample orthonormal designs
  {
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      int T = 30 + static_cast<int>(rng.uniform_int(30));
      int k = 2 + static_cast<int>(rng.uniform_int(6));
      Matrix raw = random_matrix(rng, T, k);
      Eigen::HouseholderQR<Matrix> qr(raw);
      Matrix Z = qr.householderQ() * Matrix::Identity(T, k);
      Vector y = random_vector(rng, T);
      double lambda = 0.2 + 2.0 * rng.uniform();
      auto fit = lasso_fit(y, Z, lambda);
      Vector rho = Z.transpose() * y;
      for (int j = 0; j < k; ++j) {
        double expected = 0.0;
        if (rho[j] > lambda / 2) expected = rho[j] - lambda / 2;
        else if (rho[j] < -lambda / 2) expected = rho[j] + lambda / 2;
        if (std::abs(fit.coefficients[j] - expected) > 1e-9) ok = false;
      }
    }
    report("C5 LASSO matches the soft-threshold closed form (20 instances)",
           ok, "");
  }

  // bootstrap quantile vs the Gaussian closed form for single-column block
  // sums: max_j |A'e|/sqrt(T) with k=1 is |N(0, ||A||^2)|/sqrt(T)
  {
    bool ok = true;
    double worst = 0.0;
    const double z95 = 1.6448536269514722;  // 0.90 quantile of |N(0,1)|
    for (int i = 0; i < 20; ++i) {
      int l_T = 1 + static_cast<int>(rng.uniform_int(8));
      int T = l_T * 4;
      Matrix A = random_matrix(rng, l_T, 1);
      double sigma = A.norm() / std::sqrt(double(T));
      double expected = sigma * z95;
      double c = bootstrap_critical_value(A, T, 0.10, 200000,
                                          Rng(900 + static_cast<std::uint64_t>(i)));
      double err = std::abs(c - expected) / sigma;
      worst = std::max(worst, err);
      if (err > 0.025) ok = false;
    }
    report("C5 bootstrap quantile matches the Gaussian closed form "
           "(20 instances, B=200000)", ok,
           "max err " + std::to_string(worst) + " sigma units");
  }

  // fixed-point solver vs direct substitution and the gamma_f = 0 closed form
  {
    bool ok = true;
    int done = 0;
    while (done < 20) {
      DgpCalibration c;
      c.a21 = rng.uniform() * 0.5;
      c.a22 = rng.uniform() * 0.5;
      c.a23 = rng.uniform() * 0.5;
      c.lambda = rng.uniform() * 0.2;
      c.gamma_f = 0.3 + 0.5 * rng.uniform();
      Eigen::Vector3d row;
      try {
        row = solve_inflation_row(c);
      } catch (const config_error&) {
        continue;  // drew a non-stationary calibration; resample
      }
      ++done;
      double gf = c.gamma_f, lam = c.lambda;
      double denom = 1.0 - gf * row[0];
      double r0 = row[0] - ((1 - gf) + (lam + gf * row[1]) * c.a21 +
                            gf * row[2] * c.a31) / denom;
      double r1 = row[1] - ((lam + gf * row[1]) * c.a22 + gf * row[2] * c.a32) / denom;
      double r2 = row[2] - ((lam + gf * row[1]) * c.a23 + gf * row[2] * c.a33) / denom;
      if (std::max({std::abs(r0), std::abs(r1), std::abs(r2)}) > 1e-12) ok = false;
      if (spectral_radius(psi_matrix(c)) >= 1.0) ok = false;

      DgpCalibration flat = c;
      flat.gamma_f = 0.0;
      auto direct = solve_inflation_row(flat);
      if (std::abs(direct[0] - (1.0 + flat.lambda * flat.a21)) > 1e-12 ||
          std::abs(direct[1] - flat.lambda * flat.a22) > 1e-12 ||
          std::abs(direct[2] - flat.lambda * flat.a23) > 1e-12)
        ok = false;
    }
    report("C5 RE fixed point matches substitution and closed forms "
           "(20 instances)", ok, "");
  }
}

// ---------------------------------------------------------------------------
// Criterion 6: invariant suite.

void criterion_invariants() {
  Rng rng(5551);

  // S invariance under nonsingular instrument transforms
  {
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      Matrix Zs = random_matrix(rng, 40, 3);
      Vector eps = random_vector(rng, 40);
      Matrix A = random_matrix(rng, 3, 3) + 3.0 * Matrix::Identity(3, 3);
      SStatConfig config;
      double s1 = s_statistic(Zs, eps, config);
      double s2 = s_statistic(Zs * A, eps, config);
      if (std::abs(s1 - s2) > 1e-8 * std::max(1.0, std::abs(s1))) ok = false;
    }
    report("C6 S invariant under nonsingular instrument transforms", ok, "");
  }

  // Sup Score scaling invariance: power-of-two raw rescale is bit-identical
  {
    Matrix raw = random_matrix(rng, 60, 6);
    Vector y = random_vector(rng, 60);
    Matrix Yend = random_matrix(rng, 60, 1);
    auto run = [&](const Matrix& z) {
      EstimationProblem p;
      p.Z = standardize_columns(z).values;
      p.y = y;
      p.Y = Yend;
      p.X = Matrix(60, 0);
      for (int j = 0; j < 6; ++j) p.labels.push_back("z" + std::to_string(j));
      p.partialled = true;
      SupScoreConfig config;
      config.rng_seed = 17;
      return sup_score_test(p, Vector::Zero(1), config);
    };
    auto base = run(raw);
    Matrix scaled = raw;
    scaled.col(2) *= 8.0;
    auto out = run(scaled);
    bool ok = out.statistic == base.statistic &&
              out.critical_value == base.critical_value &&
              out.reject == base.reject;
    report("C6 Sup Score decision invariant to instrument scaling", ok, "");
  }

  // Lyapunov residuals below 1e-10
  {
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      Matrix Psi = 0.3 * random_matrix(rng, 3, 3);
      if (spectral_radius(Psi) >= 0.95) continue;
      Matrix root = random_matrix(rng, 3, 3);
      Matrix Omega = root * root.transpose() + 0.05 * Matrix::Identity(3, 3);
      Matrix Gamma = stationary_covariance(Psi, Omega);
      if ((Gamma - Psi * Gamma * Psi.transpose() - Omega).cwiseAbs().maxCoeff() >
          1e-10)
        ok = false;
    }
    report("C6 Lyapunov residuals < 1e-10", ok, "");
  }

  // LASSO KKT residuals below 1e-6
  {
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      int T = 30 + static_cast<int>(rng.uniform_int(30));
      int k = 4 + static_cast<int>(rng.uniform_int(8));
      Matrix Z = random_matrix(rng, T, k);
      Vector y = random_vector(rng, T);
      double lmax = 2.0 * (Z.transpose() * y).cwiseAbs().maxCoeff();
      double lambda = lmax * std::pow(10.0, -1.0 - rng.uniform());
      auto fit = lasso_fit(y, Z, lambda);
      Vector grad = Z.transpose() * (y - Z * fit.coefficients);
      for (int j = 0; j < k; ++j) {
        if (fit.coefficients[j] == 0.0) {
          if (std::abs(grad[j]) > lambda / 2 + 1e-6) ok = false;
        } else if (std::abs(2.0 * grad[j] -
                            (fit.coefficients[j] > 0 ? lambda : -lambda)) >
                   1e-6) {
          ok = false;
        }
      }
    }
    report("C6 LASSO KKT residuals < 1e-6", ok, "");
  }

  // campaign determinism across worker counts
  {
    DgpCalibration calib;
    calib.a21 = 0.2;
    calib.a22 = 0.2;
    calib.m = 40;
    CampaignConfig cfg;
    cfg.nrep = 10;
    cfg.master_seed = 424242;
    cfg.supscore.bootstrap_draws = 150;
    cfg.workers = 1;
    auto serial = monte_carlo_size(calib, cfg);
    cfg.workers = 3;
    auto parallel = monte_carlo_size(calib, cfg);
    bool ok = true;
    for (std::size_t i = 0; i < serial.methods.size(); ++i) {
      if (serial.methods[i].rejections != parallel.methods[i].rejections ||
          serial.methods[i].ts_rejections != parallel.methods[i].ts_rejections)
        ok = false;
    }
    report("C6 campaigns identical for any worker count", ok, "");
  }
}

// ---------------------------------------------------------------------------
// Criterion 7 (conditional): empirical pipeline against a user-supplied
// FRED vintage in $MANYIV_FRED_DIR with panel.csv and transforms.csv.

void criterion_empirical() {
  const char* dir = std::getenv("MANYIV_FRED_DIR");
  if (!dir || std::string(dir).empty()) {
    report_skip("C7 empirical pipeline (T=179, k=359, Table-2/3 selections)",
                "conditional on user data; set MANYIV_FRED_DIR to run");
    report_skip("C7 Sup Score confidence sets wider than crude/LASSO (40x40)",
                "conditional on user data; set MANYIV_FRED_DIR to run");
    return;
  }
  try {
    auto panel = read_panel_csv(std::string(dir) + "/panel.csv");
    EmpiricalConfig config;
    config.transforms = read_transform_map(std::string(dir) + "/transforms.csv");
    auto problem = assemble_empirical_design(config, panel);
    {
      std::ostringstream os;
      os << "T=" << problem.T() << " k=" << problem.k();
      report("C7 assembled design has T=179, k=359",
             problem.T() == 179 && problem.k() == 359, os.str());
    }

    SelectionSpec spec;
    spec.k_s = 4;
    auto crude = select_crude_threshold(problem.Y, problem.Z, spec);
    std::set<std::string> crude_labels;
    for (int idx : crude)
      crude_labels.insert(problem.labels[static_cast<std::size_t>(idx)]);
    std::set<std::string> table2_crude = {"PRS85006173.-1", "PRS85006173.-2",
                                          "DSERRG3M086SBEA.-1",
                                          "CES3000000008.-1"};
    report("C7 crude thresholding reproduces the published selection",
           crude_labels == table2_crude, "");

    auto lasso = select_lasso(problem.Y, problem.Z, spec);
    std::set<std::string> lasso_labels;
    for (int idx : lasso)
      lasso_labels.insert(problem.labels[static_cast<std::size_t>(idx)]);
    std::set<std::string> table2_lasso = {"PRS85006173.-1", "PRS85006173.-2",
                                          "DSERRG3M086SBEA.-1", "SRVPRD.-3"};
    report("C7 LASSO reproduces the published selection",
           lasso_labels == table2_lasso, "");

    // 40x40 coarsened inversion: argmax histogram and relative set widths
    HypothesisGrid grid;
    grid.gf_min = -0.5; grid.gf_max = 1.5; grid.gf_step = 2.0 / 39.0;
    grid.lam_min = -0.5; grid.lam_max = 1.0; grid.lam_step = 1.5 / 39.0;
    MethodConfig mc;
    mc.method = Method::SupScore;
    mc.workers = default_workers();
    auto sup = invert_test(problem, nullptr, grid, mc, 1);
    std::map<std::string, int> hist;
    for (const auto& r : sup.results) ++hist[r.result.argmax_label];
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& [label, count] : hist) ranked.push_back({count, label});
    std::sort(ranked.rbegin(), ranked.rend());
    bool heads = ranked.size() >= 2 &&
                 ((ranked[0].second == "CES3000000008.-1" &&
                   ranked[1].second == "HOUSTNE.-3") ||
                  (ranked[0].second == "HOUSTNE.-3" &&
                   ranked[1].second == "CES3000000008.-1"));
    report("C7 Sup Score argmax histogram headed by CES3000000008.-1 / "
           "HOUSTNE.-3", heads,
           ranked.empty() ? "" : "top: " + ranked[0].second);

    mc.method = Method::CrudeS;
    auto crude_grid = invert_test(problem, nullptr, grid, mc, 1);
    mc.method = Method::LassoS;
    auto lasso_grid = invert_test(problem, nullptr, grid, mc, 1);
    std::ostringstream os;
    os << "in-set counts: sup=" << sup.in_set_count()
       << " crude=" << crude_grid.in_set_count()
       << " lasso=" << lasso_grid.in_set_count();
    report("C7 Sup Score confidence sets wider than crude/LASSO (40x40)",
           sup.in_set_count() > crude_grid.in_set_count() &&
               sup.in_set_count() > lasso_grid.in_set_count(),
           os.str());
  } catch (const std::exception& e) {
    report("C7 empirical pipeline", false, e.what());
  }
}

}  // namespace

int main() {
  std::cout << "acceptance suite (deterministic seeds)" << std::endl;
  criterion_concentration_golden();
  criteria_size_and_two_step();
  criterion_supscore_power();
  criterion_micro_oracles();
  criterion_invariants();
  criterion_empirical();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(g_failures) + " FAILURES")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
