#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "manyiv/gmm_s.hpp"
#include "manyiv/nkpc.hpp"
#include "manyiv/selection.hpp"
#include "manyiv/supscore.hpp"
#include "manyiv/types.hpp"

namespace manyiv {

// Rectangular (gamma_f, lambda) hypothesis grid, enumerated row-major with
// gamma_f as the outer dimension.
struct HypothesisGrid {
  double gf_min = -0.5, gf_max = 1.5, gf_step = 0.01;
  double lam_min = -0.5, lam_max = 1.0, lam_step = 0.01;

  struct Point {
    double gamma_f;
    double lambda;
  };
  std::vector<Point> points() const;
  int gf_count() const;
  int lam_count() const;
};

enum class Method { OracleS, RandomS, CrudeS, LassoS, SupScore };

std::string method_name(Method method);
Method parse_method(const std::string& name);

struct MethodConfig {
  Method method = Method::SupScore;
  SStatConfig s;            // concentrate is filled per problem by the harness
  SupScoreConfig supscore;  // seed is overridden by the campaign substreams
  SelectionSpec selection;
  int workers = 1;
};

// Per-point record of a test inversion.
struct PointOutcome {
  TestResult result;
  bool failed = false;
  std::string error;
};

struct ConfidenceGrid {
  HypothesisGrid grid;
  std::string method;
  std::vector<PointOutcome> results;  // one per grid point, row-major
  std::vector<bool> mask;             // in the confidence set <=> not rejected
  std::vector<int> selected;          // S methods: instruments used
  std::vector<std::string> selected_labels;
  std::size_t in_set_count() const;
};

// Evaluates the configured test at every grid point of a single dataset.
// Selection runs once, before inversion. Per-point failures are recorded,
// not fatal. `oracle` supplies the infeasible instrument set when available
// (simulated data only).
ConfidenceGrid invert_test(const EstimationProblem& problem,
                           const SimulatedDataset* oracle,
                           const HypothesisGrid& grid,
                           const MethodConfig& config,
                           std::uint64_t seed);

// true iff the robust overidentification test does NOT reject at alpha AND
// the S test rejects theta0 at alpha.
bool two_step_rejection(const EstimationProblem& problem,
                        const std::vector<int>& selected, const Vector& theta0,
                        const SStatConfig& config);

struct MethodFrequency {
  std::string method;
  int n = 0;
  int rejections = 0;
  int ts_rejections = 0;  // overid-gated rejections (S methods)
  int failures = 0;       // degenerate replications, counted as non-rejections
  bool has_two_step = false;
  double rf() const { return n ? double(rejections) / n : 0.0; }
  double ts() const { return n ? double(ts_rejections) / n : 0.0; }
  double rf_se() const;
};

struct CampaignResult {
  DgpCalibration calib;
  double mu2_oracle = 0.0;
  double mu2_observed = 0.0;
  int nrep = 0;
  std::vector<MethodFrequency> methods;
};

struct CampaignConfig {
  std::vector<Method> methods{Method::OracleS, Method::RandomS, Method::CrudeS,
                              Method::LassoS, Method::SupScore};
  int nrep = 1000;
  double alpha = 0.10;
  std::uint64_t master_seed = 1;
  int workers = 1;
  SStatConfig s;
  SupScoreConfig supscore;
  SelectionSpec selection;
  bool with_two_step = true;
};

// Size campaign at the true theta: per replication, simulate, select, test,
// and record plain and overid-gated rejections. Deterministic in
// (calibration, master_seed) for any worker count. Aborts if more than 1% of
// replications fail for any method.
CampaignResult monte_carlo_size(const DgpCalibration& calib,
                                const CampaignConfig& config);

struct PowerPoint {
  double gamma_f = 0.0;
  double lambda = 0.0;
  int rejections = 0;
  int n = 0;
  int failures = 0;
};

// Power map: every grid point tested in every replication.
std::vector<PowerPoint> monte_carlo_power(const DgpCalibration& calib,
                                          Method method,
                                          const HypothesisGrid& grid,
                                          const CampaignConfig& config);

}  // namespace manyiv
