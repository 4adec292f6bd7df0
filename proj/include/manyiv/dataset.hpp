#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manyiv/types.hpp"

namespace manyiv {

// Quarterly period, encoded as year*4 + (quarter-1) so consecutive quarters
// differ by one.
class Quarter {
 public:
  Quarter() = default;
  Quarter(int year, int q) : index_(year * 4 + q - 1) {}

  // Accepts "1974Q2" / "1974q2" or an ISO date "1974-04-01" (month mapped to
  // its quarter).
  static Quarter parse(const std::string& text);

  int year() const { return index_ >= 0 ? index_ / 4 : (index_ - 3) / 4; }
  int quarter() const { return index_ - year() * 4 + 1; }
  int index() const { return index_; }

  Quarter next() const { return from_index(index_ + 1); }
  Quarter prev() const { return from_index(index_ - 1); }

  std::string str() const;

  auto operator<=>(const Quarter&) const = default;

  static Quarter from_index(int idx) {
    Quarter q;
    q.index_ = idx;
    return q;
  }

 private:
  int index_ = 0;
};

enum class TransformCode { N, G, D, GG };

TransformCode parse_transform_code(const std::string& text);
std::string transform_code_name(TransformCode code);

// One raw quarterly series: contiguous dates, no missing values.
struct RawSeries {
  std::string code;
  std::vector<Quarter> dates;
  std::vector<double> values;

  void validate() const;  // strictly increasing, gap-free, sizes match
};

// N: identity. G: 100*(log f_t - log f_{t-1}), drops the first observation.
// D: first difference, drops the first observation. GG: 0.1226*100*log(f/100)
// pointwise, nothing dropped.
RawSeries apply_transform(const RawSeries& series, TransformCode code);

// Restricts every series to the common date range. Errors if the
// intersection is empty.
std::vector<RawSeries> align_panel(const std::vector<RawSeries>& panel);

struct LagMatrix {
  Matrix values;                    // (n - lags) x (n_series * lags)
  std::vector<std::string> labels;  // CODE.-lag, series-major, lag-minor
  std::vector<Quarter> dates;       // row dates
};

// Columns are (series, lag) pairs for lag = 1..lags; rows are the dates where
// all lags exist. All series must share one date index.
LagMatrix build_lag_matrix(const std::vector<RawSeries>& panel, int lags);

struct Standardized {
  Matrix values;
  Vector means;
  Vector sds;  // divisor-T convention
};

// Columns scaled to mean 0 and standard deviation 1 (divisor T).
Standardized standardize_columns(const Matrix& m);

// M_X * target with M_X = I - X(X'X)^{-1}X'. X must have full column rank.
Matrix partial_out(const Matrix& target, const Matrix& X);

// Applies M_X to y, Y and Z, re-standardizes Z, and flags the problem.
// No-op if already partialled.
EstimationProblem partial_out_problem(const EstimationProblem& problem);

// ---------------------------------------------------------------------------
// Empirical pipeline: CSV panels -> EstimationProblem

// Long format: date,code,value. Wide format: date plus one column per code.
// Detected by header.
std::vector<RawSeries> read_panel_csv(const std::filesystem::path& path);

// Two columns: code,transform.
std::map<std::string, TransformCode> read_transform_map(
    const std::filesystem::path& path);

struct EmpiricalConfig {
  std::string dependent_code = "GDPDEF";      // inflation source, G transform
  std::string forcing_code = "PRS85006173";   // labor share, GG transform
  int lags = 4;
  Quarter window_start{1974, 2};
  Quarter window_end{2018, 4};
  std::map<std::string, TransformCode> transforms;
};

// Builds the partialled design: y = M_X pi, Y = M_X [s pi_{+1}],
// X = [1 pi_{-1}], Z = standardized M_X lag matrix with the dependent
// series' first lag excluded.
EstimationProblem assemble_empirical_design(const EmpiricalConfig& config,
                                            const std::vector<RawSeries>& panel);

// Audit bundle: y.csv, Y.csv, X.csv, Z.csv, labels.csv.
void write_design_bundle(const EstimationProblem& problem,
                         const std::filesystem::path& dir);

}  // namespace manyiv
