#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace manyiv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A single-equation IV design, ready for testing: y = g(Y, X, theta) + eps
// with moment conditions E[Z_t eps_t] = 0. g is linear throughout: Y*theta
// plus X*beta for the exogenous nuisance coefficients.
//
// When `partialled` is set, y, Y and Z have been premultiplied by
// M_X = I - X(X'X)^{-1}X' and every column is orthogonal to the columns of X;
// tests then ignore X entirely. Otherwise the exogenous coefficients are
// concentrated out inside the GMM objective.
struct EstimationProblem {
  Vector y;                           // T
  Matrix Y;                           // T x p1, endogenous covariates
  Matrix X;                           // T x p2, exogenous covariates
  Matrix Z;                           // T x k, candidate excluded instruments
  std::vector<std::string> labels;    // k instrument identifiers, CODE.-lag
  std::vector<std::string> x_labels;  // p2 exogenous identifiers
  bool partialled = false;

  Eigen::Index T() const { return y.size(); }
  Eigen::Index p1() const { return Y.cols(); }
  Eigen::Index p2() const { return X.cols(); }
  Eigen::Index k() const { return Z.cols(); }
};

// Outcome of a single hypothesis test. `reject` always equals
// statistic > critical_value.
struct TestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  double alpha = 0.0;
  std::string method;  // e.g. "s:chi2(4)" or "supscore:bootstrap"
  std::map<std::string, double> extras;
  std::string argmax_label;  // Sup Score only: instrument attaining the max
};

}  // namespace manyiv
