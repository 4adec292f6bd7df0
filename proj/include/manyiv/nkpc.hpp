#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manyiv/rng.hpp"
#include "manyiv/types.hpp"

namespace manyiv {

// Simulation calibration. The VAR is R_t = Psi R_{t-1} + u_t over
// R = (pi, s, f), u ~ N(0, Omega); the first Psi row is pinned down by the
// restricted NKPC (gamma_b + gamma_f = 1, c = 0) under rational expectations.
// The observed panel adds Q_t = xi f_t + noise, widening the instrument set.
struct DgpCalibration {
  double gamma_f = 0.8;
  double lambda = 0.05;
  int T = 100;
  double a21 = 0.0, a22 = 0.0, a23 = 0.0;
  double a31 = 0.0, a32 = 0.0, a33 = 0.7;
  // innovation covariance; the printed concentration values pin w33 at 1.0
  double w11 = 0.07, w12 = 0.03, w13 = 0.0;
  double w22 = 0.7, w23 = 0.0;
  double w33 = 1.0;
  int m = 200;        // factor-panel width
  double tau = 0.05;  // loading scale
  int burn_in = 200;
  std::uint64_t seed = 0;

  Eigen::Matrix3d omega() const {
    Eigen::Matrix3d W;
    W << w11, w12, w13, w12, w22, w23, w13, w23, w33;
    return W;
  }
};

// Fixed point of the restricted NKPC substituted into the VAR first row:
//   a11 = [(1-gf) + (lam + gf a12) a21 + gf a13 a31] / (1 - gf a11)
//   a12 = [(lam + gf a12) a22 + gf a13 a32] / (1 - gf a11)
//   a13 = [(lam + gf a12) a23 + gf a13 a33] / (1 - gf a11)
// Damped iteration from (0,0,0); the returned solution has residual < 1e-12
// and the full Psi matrix is stationary.
Eigen::Vector3d solve_inflation_row(const DgpCalibration& calib);

Eigen::Matrix3d psi_matrix(const DgpCalibration& calib);

double spectral_radius(const Matrix& A);

// Solves Gamma = Psi Gamma Psi' + Omega via vec(Gamma) =
// (I - kron(Psi, Psi))^{-1} vec(Omega); requires spectral radius < 1.
Matrix stationary_covariance(const Matrix& Psi, const Matrix& Omega);

// xi_q = tau * (-1)^q * log((q+1)^2 / (m q)), q = 1..m.
Vector make_xi(int m, double tau);

// First-stage concentration quantities for the oracle instruments
// (pi_{t-1}, s_{t-1}, f_{t-1}) and for the observed panel
// (pi_{t-1}, s_{t-1}, Q_{t-1}).
struct ConcentrationReport {
  Eigen::Matrix3d Psi;
  Eigen::Matrix3d Gamma;
  Eigen::Matrix<double, 2, 3> D;
  Eigen::Matrix2d Sigma;
  Eigen::Matrix2d C;
  double mu2_oracle = 0.0;  // min eigenvalue of C

  bool has_observed = false;
  Matrix Xi;       // (m+2) x 3 loading map
  Matrix F;        // (m+2) x (m+2) proxy-noise covariance
  Matrix Gamma_t;  // (m+2) x (m+2)
  Matrix M_t;      // 2 x (m+2)
  Eigen::Matrix2d Sigma_t;
  Eigen::Matrix2d C_t;
  double mu2_observed = 0.0;  // min eigenvalue of C_t
};

ConcentrationReport concentration_oracle(const DgpCalibration& calib);
ConcentrationReport concentration_observed(const DgpCalibration& calib);

// One simulated estimation problem for the econometrician:
//   y_t = dpi_t,  Y_t = (s_t, pi_{t+1} - pi_{t-1}),  X = [1],
//   Z_t = standardized (pi_{t-1}, s_{t-1}, Q_{t-1}'), T usable rows.
// The infeasible oracle instruments are returned unstandardized alongside.
struct SimulatedDataset {
  EstimationProblem problem;
  Matrix oracle_Z;  // T x 3: pi_{t-1}, s_{t-1}, f_{t-1}
  std::vector<std::string> oracle_labels;
  Vector true_theta;  // (lambda, gamma_f)
  // Endogenous variables in level form (s_t, pi_{t+1}). Crude thresholding
  // ranks the factor-panel instruments against these after partialling out
  // the constant and the traditional instruments (pi_{t-1}, s_{t-1}),
  // mirroring the empirical design where Y is the partialled lead level.
  Matrix selection_basis;  // T x 2
};

SimulatedDataset simulate_dataset(const DgpCalibration& calib, const Rng& rng);

}  // namespace manyiv
