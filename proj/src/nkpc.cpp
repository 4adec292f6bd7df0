#include "manyiv/nkpc.hpp"

#include <cmath>
#include <sstream>

#include "manyiv/dataset.hpp"
#include "manyiv/errors.hpp"

namespace manyiv {

namespace {

Eigen::Vector3d row_map(const DgpCalibration& c, const Eigen::Vector3d& x) {
  const double gf = c.gamma_f, lam = c.lambda;
  const double denom = 1.0 - gf * x[0];
  if (std::abs(denom) < 1e-12)
    throw config_error("solve_inflation_row: 1 - gamma_f*a11 vanished");
  Eigen::Vector3d next;
  next[0] = ((1.0 - gf) + (lam + gf * x[1]) * c.a21 + gf * x[2] * c.a31) / denom;
  next[1] = ((lam + gf * x[1]) * c.a22 + gf * x[2] * c.a32) / denom;
  next[2] = ((lam + gf * x[1]) * c.a23 + gf * x[2] * c.a33) / denom;
  return next;
}

// symmetric inverse square root of an SPD matrix
Matrix inverse_sqrt_spd(const Matrix& S, const std::string& name) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw numerical_error(name + " is not positive definite (min eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()) + ")");
  Vector inv_root = es.eigenvalues().array().rsqrt();
  return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Eigen::Vector3d solve_inflation_row(const DgpCalibration& calib) {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  const double damping = 0.5;
  bool settled = false;
  for (int it = 0; it < 10000; ++it) {
    Eigen::Vector3d next = (1.0 - damping) * x + damping * row_map(calib, x);
    const double step = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (step < 1e-15) {
      settled = true;
      break;
    }
  }
  const double residual = (x - row_map(calib, x)).cwiseAbs().maxCoeff();
  if (!settled || residual > 1e-12)
    throw config_error("solve_inflation_row: no fixed point within 10000 "
                       "iterations (residual " + std::to_string(residual) + ")");

  // gamma_f = 0 has a unique direct-substitution solution (possibly a unit
  // root); otherwise the iteration must have landed on a stationary root
  if (calib.gamma_f != 0.0) {
    Eigen::Matrix3d Psi;
    Psi << x[0], x[1], x[2], calib.a21, calib.a22, calib.a23, calib.a31,
        calib.a32, calib.a33;
    if (spectral_radius(Psi) >= 1.0)
      throw config_error("solve_inflation_row: fixed point is non-stationary "
                         "(spectral radius " +
                         std::to_string(spectral_radius(Psi)) + ")");
  }
  return x;
}

Eigen::Matrix3d psi_matrix(const DgpCalibration& calib) {
  Eigen::Vector3d row = solve_inflation_row(calib);
  Eigen::Matrix3d Psi;
  Psi << row[0], row[1], row[2], calib.a21, calib.a22, calib.a23, calib.a31,
      calib.a32, calib.a33;
  return Psi;
}

double spectral_radius(const Matrix& A) {
  Eigen::EigenSolver<Matrix> es(A, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix stationary_covariance(const Matrix& Psi, const Matrix& Omega) {
  const auto n = Psi.rows();
  if (Psi.cols() != n || Omega.rows() != n || Omega.cols() != n)
    throw config_error("stationary_covariance: dimension mismatch");
  if (spectral_radius(Psi) >= 1.0)
    throw numerical_error("stationary_covariance: spectral radius >= 1");

  // vec(Gamma) = (I - kron(Psi, Psi))^{-1} vec(Omega), column-major vec
  const auto n2 = n * n;
  Matrix K(n2, n2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n) = Psi(i, j) * Psi;
  Matrix lhs = Matrix::Identity(n2, n2) - K;
  Vector vec_omega(n2);
  for (Eigen::Index j = 0; j < n; ++j)
    vec_omega.segment(j * n, n) = Omega.col(j);
  Vector vec_gamma = lhs.partialPivLu().solve(vec_omega);

  Matrix Gamma(n, n);
  for (Eigen::Index j = 0; j < n; ++j) Gamma.col(j) = vec_gamma.segment(j * n, n);
  Gamma = 0.5 * (Gamma + Gamma.transpose()).eval();

  const double residual =
      (Gamma - Psi * Gamma * Psi.transpose() - Omega).cwiseAbs().maxCoeff();
  if (residual > 1e-10)
    throw numerical_error("stationary_covariance: Lyapunov residual " +
                          std::to_string(residual));
  return Gamma;
}

Vector make_xi(int m, double tau) {
  if (m < 1) throw config_error("make_xi: m must be >= 1");
  Vector xi(m);
  for (int q = 1; q <= m; ++q) {
    const double sign = (q % 2 == 0) ? 1.0 : -1.0;
    xi[q - 1] = tau * sign * std::log(double(q + 1) * double(q + 1) /
                                      (double(m) * double(q)));
  }
  return xi;
}

ConcentrationReport concentration_oracle(const DgpCalibration& calib) {
  ConcentrationReport rep;
  rep.Psi = psi_matrix(calib);
  rep.Gamma = stationary_covariance(rep.Psi, calib.omega());

  Eigen::Matrix<double, 2, 3> E1, E2, E3;
  E1 << 1, 0, 0, 0, 0, 0;
  E2 << 0, 0, 0, 0, 1, 0;
  E3 << -1, 0, 0, 0, 0, 0;

  const Eigen::Matrix3d Omega = calib.omega();
  rep.D = E1 * rep.Psi * rep.Psi + E2 * rep.Psi + E3;
  Eigen::Matrix<double, 2, 3> B = E1 * rep.Psi + E2;
  rep.Sigma = B * Omega * B.transpose() + E1 * Omega * E1.transpose();

  Matrix Si = inverse_sqrt_spd(rep.Sigma, "Sigma");
  rep.C = double(calib.T) * Si * rep.D * rep.Gamma * rep.D.transpose() *
          Si.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rep.C);
  rep.mu2_oracle = es.eigenvalues().minCoeff();
  return rep;
}

ConcentrationReport concentration_observed(const DgpCalibration& calib) {
  ConcentrationReport rep = concentration_oracle(calib);
  const int m = calib.m;

  rep.Xi = Matrix::Zero(m + 2, 3);
  rep.Xi(0, 0) = 1.0;
  rep.Xi(1, 1) = 1.0;
  rep.Xi.col(2).tail(m) = make_xi(m, calib.tau);

  rep.F = Matrix::Zero(m + 2, m + 2);
  rep.F.bottomRightCorner(m, m).setIdentity();

  rep.Gamma_t = rep.Xi * rep.Gamma * rep.Xi.transpose() + rep.F;
  Eigen::LDLT<Matrix> ldlt(rep.Gamma_t);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw numerical_error("concentration_observed: Gamma_tilde singular");

  // M_t = D Gamma Xi' Gamma_t^{-1}
  Matrix rhs = rep.Xi * rep.Gamma * rep.D.transpose();  // (m+2) x 2
  rep.M_t = ldlt.solve(rhs).transpose();                // 2 x (m+2)

  Matrix DmMXi = rep.D - rep.M_t * rep.Xi;  // 2 x 3
  rep.Sigma_t = DmMXi * rep.Gamma * DmMXi.transpose() + rep.Sigma +
                rep.M_t * rep.F * rep.M_t.transpose();

  Matrix Si = inverse_sqrt_spd(rep.Sigma_t, "Sigma_tilde");
  rep.C_t = double(calib.T) * Si * rep.M_t * rep.Gamma_t *
            rep.M_t.transpose() * Si.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rep.C_t);
  rep.mu2_observed = es.eigenvalues().minCoeff();
  rep.has_observed = true;
  return rep;
}

SimulatedDataset simulate_dataset(const DgpCalibration& calib, const Rng& rng) {
  if (calib.T < 8) throw config_error("simulate_dataset: T too small");
  if (calib.burn_in < 1) throw config_error("simulate_dataset: burn_in must be >= 1");
  const Eigen::Matrix3d Psi = psi_matrix(calib);
  const Eigen::Matrix3d Omega = calib.omega();

  // symmetric factor so a PSD (possibly singular) Omega still samples
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Omega);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw config_error("simulate_dataset: Omega is not positive semidefinite");
  Eigen::Matrix3d root =
      es.eigenvectors() *
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
      es.eigenvectors().transpose();

  const int T = calib.T;
  const int burn = calib.burn_in;
  const int periods = burn + T + 1;  // R_0 = 0, then R_1..R_{burn+T+1}

  Rng var_rng = rng.derive(0);
  Matrix R = Matrix::Zero(periods + 1, 3);
  for (int t = 1; t <= periods; ++t) {
    Eigen::Vector3d shock;
    shock << var_rng.normal(), var_rng.normal(), var_rng.normal();
    R.row(t) = (Psi * R.row(t - 1).transpose() + root * shock).transpose();
  }

  // Q_{t-1} for usable t = burn+1..burn+T
  Rng q_rng = rng.derive(1);
  const int m = calib.m;
  Vector xi = make_xi(m, calib.tau);
  Matrix Q_lag(T, m);
  for (int i = 0; i < T; ++i) {
    const double f_lag = R(burn + i, 2);
    for (int q = 0; q < m; ++q) Q_lag(i, q) = xi[q] * f_lag + q_rng.normal();
  }

  SimulatedDataset out;
  out.true_theta = Vector(2);
  out.true_theta << calib.lambda, calib.gamma_f;

  EstimationProblem& p = out.problem;
  p.y = Vector(T);
  p.Y = Matrix(T, 2);
  out.selection_basis = Matrix(T, 2);
  Matrix Zraw(T, 2 + m);
  out.oracle_Z = Matrix(T, 3);
  for (int i = 0; i < T; ++i) {
    const int t = burn + 1 + i;
    const double pi_t = R(t, 0), pi_prev = R(t - 1, 0), pi_next = R(t + 1, 0);
    p.y[i] = pi_t - pi_prev;
    p.Y(i, 0) = R(t, 1);
    p.Y(i, 1) = pi_next - pi_prev;
    out.selection_basis(i, 0) = R(t, 1);
    out.selection_basis(i, 1) = pi_next;
    Zraw(i, 0) = pi_prev;
    Zraw(i, 1) = R(t - 1, 1);
    Zraw.row(i).tail(m) = Q_lag.row(i);
    out.oracle_Z(i, 0) = pi_prev;
    out.oracle_Z(i, 1) = R(t - 1, 1);
    out.oracle_Z(i, 2) = R(t - 1, 2);
  }

  p.X = Matrix::Ones(T, 1);
  p.x_labels = {"const"};
  p.labels.reserve(static_cast<std::size_t>(2 + m));
  p.labels.push_back("pi.-1");
  p.labels.push_back("s.-1");
  for (int q = 1; q <= m; ++q) p.labels.push_back("Q" + std::to_string(q) + ".-1");
  p.Z = standardize_columns(Zraw).values;
  p.partialled = false;

  out.oracle_labels = {"pi.-1", "s.-1", "f.-1"};
  return out;
}

}  // namespace manyiv
