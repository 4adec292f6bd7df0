#include "manyiv/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "manyiv/csv.hpp"
#include "manyiv/errors.hpp"

namespace manyiv {

Quarter Quarter::parse(const std::string& text) {
  std::string s = text;
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  auto qpos = s.find('Q');
  try {
    if (qpos != std::string::npos) {
      int year = std::stoi(s.substr(0, qpos));
      int q = std::stoi(s.substr(qpos + 1));
      if (q < 1 || q > 4) throw data_error("bad quarter in date '" + text + "'");
      return Quarter(year, q);
    }
    auto dash = s.find('-');
    if (dash != std::string::npos) {
      int year = std::stoi(s.substr(0, dash));
      int month = std::stoi(s.substr(dash + 1, 2));
      if (month < 1 || month > 12)
        throw data_error("bad month in date '" + text + "'");
      return Quarter(year, (month - 1) / 3 + 1);
    }
  } catch (const std::invalid_argument&) {
  } catch (const std::out_of_range&) {
  }
  throw data_error("cannot parse date '" + text + "' (want YYYYQn or ISO)");
}

std::string Quarter::str() const {
  return std::to_string(year()) + "Q" + std::to_string(quarter());
}

TransformCode parse_transform_code(const std::string& text) {
  if (text == "N") return TransformCode::N;
  if (text == "G") return TransformCode::G;
  if (text == "D") return TransformCode::D;
  if (text == "GG") return TransformCode::GG;
  throw data_error("unknown transform code '" + text + "'");
}

std::string transform_code_name(TransformCode code) {
  switch (code) {
    case TransformCode::N: return "N";
    case TransformCode::G: return "G";
    case TransformCode::D: return "D";
    case TransformCode::GG: return "GG";
  }
  return "?";
}

void RawSeries::validate() const {
  if (dates.size() != values.size())
    throw data_error("series " + code + ": dates/values length mismatch");
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (dates[i].index() != dates[i - 1].index() + 1)
      throw data_error("series " + code + ": date gap or disorder at " +
                       dates[i].str());
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw data_error("series " + code + ": non-finite value at " +
                       dates[i].str());
  }
}

RawSeries apply_transform(const RawSeries& series, TransformCode code) {
  series.validate();
  const auto& v = series.values;
  RawSeries out;
  out.code = series.code;
  switch (code) {
    case TransformCode::N:
      return series;
    case TransformCode::G: {
      if (v.size() < 2)
        throw data_error("series " + series.code +
                         ": need at least 2 observations for transform G");
      out.dates.assign(series.dates.begin() + 1, series.dates.end());
      out.values.resize(v.size() - 1);
      for (std::size_t t = 1; t < v.size(); ++t) {
        if (v[t] <= 0.0 || v[t - 1] <= 0.0)
          throw data_error("series " + series.code + ": non-positive value at " +
                           series.dates[t - (v[t] > 0.0 ? 1 : 0)].str() +
                           " under transform G");
        out.values[t - 1] = 100.0 * (std::log(v[t]) - std::log(v[t - 1]));
      }
      return out;
    }
    case TransformCode::D: {
      if (v.size() < 2)
        throw data_error("series " + series.code +
                         ": need at least 2 observations for transform D");
      out.dates.assign(series.dates.begin() + 1, series.dates.end());
      out.values.resize(v.size() - 1);
      for (std::size_t t = 1; t < v.size(); ++t)
        out.values[t - 1] = v[t] - v[t - 1];
      return out;
    }
    case TransformCode::GG: {
      out.dates = series.dates;
      out.values.resize(v.size());
      for (std::size_t t = 0; t < v.size(); ++t) {
        if (v[t] <= 0.0)
          throw data_error("series " + series.code + ": non-positive value at " +
                           series.dates[t].str() + " under transform GG");
        out.values[t] = 0.1226 * 100.0 * std::log(v[t] / 100.0);
      }
      return out;
    }
  }
  throw data_error("unreachable transform code");
}

std::vector<RawSeries> align_panel(const std::vector<RawSeries>& panel) {
  if (panel.empty()) throw data_error("empty panel");
  int start = panel[0].dates.front().index();
  int end = panel[0].dates.back().index();
  for (const auto& s : panel) {
    s.validate();
    start = std::max(start, s.dates.front().index());
    end = std::min(end, s.dates.back().index());
  }
  if (start > end) throw data_error("panel has no common date range");
  std::vector<RawSeries> out;
  out.reserve(panel.size());
  for (const auto& s : panel) {
    RawSeries r;
    r.code = s.code;
    int offset = start - s.dates.front().index();
    int n = end - start + 1;
    r.dates.assign(s.dates.begin() + offset, s.dates.begin() + offset + n);
    r.values.assign(s.values.begin() + offset, s.values.begin() + offset + n);
    out.push_back(std::move(r));
  }
  return out;
}

LagMatrix build_lag_matrix(const std::vector<RawSeries>& panel, int lags) {
  if (panel.empty()) throw data_error("empty panel");
  if (lags < 1) throw config_error("lags must be positive");
  const auto& index = panel[0].dates;
  std::vector<std::string> offending;
  for (const auto& s : panel) {
    if (s.dates.size() != index.size() || s.dates.front() != index.front() ||
        s.dates.back() != index.back())
      offending.push_back(s.code);
  }
  if (!offending.empty()) {
    std::string msg = "misaligned date indices:";
    for (const auto& c : offending) msg += " " + c;
    throw data_error(msg);
  }
  const int n = static_cast<int>(index.size());
  if (n <= lags)
    throw data_error("panel too short for " + std::to_string(lags) + " lags");

  LagMatrix out;
  const int rows = n - lags;
  out.values.resize(rows, static_cast<Eigen::Index>(panel.size()) * lags);
  out.dates.assign(index.begin() + lags, index.end());
  int col = 0;
  for (const auto& s : panel) {
    for (int lag = 1; lag <= lags; ++lag) {
      for (int r = 0; r < rows; ++r)
        out.values(r, col) = s.values[static_cast<std::size_t>(r + lags - lag)];
      out.labels.push_back(s.code + ".-" + std::to_string(lag));
      ++col;
    }
  }
  return out;
}

Standardized standardize_columns(const Matrix& m) {
  const auto T = m.rows();
  if (T < 1) throw data_error("cannot standardize an empty matrix");
  Standardized out;
  out.means = m.colwise().mean();
  Matrix centered = m.rowwise() - out.means.transpose();
  out.sds = (centered.array().square().colwise().sum() / double(T))
                .sqrt()
                .matrix()
                .transpose();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (!(out.sds[j] > 0.0))
      throw data_error("degenerate instrument: column " + std::to_string(j) +
                       " has zero variance");
  }
  out.values = centered.array().rowwise() / out.sds.transpose().array();
  return out;
}

Matrix partial_out(const Matrix& target, const Matrix& X) {
  if (X.rows() != target.rows())
    throw data_error("partial_out: row count mismatch");
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols())
    throw numerical_error("partial_out: X is rank deficient (rank " +
                          std::to_string(qr.rank()) + " < " +
                          std::to_string(X.cols()) + ")");
  return target - X * qr.solve(target);
}

EstimationProblem partial_out_problem(const EstimationProblem& problem) {
  if (problem.partialled || problem.p2() == 0) {
    EstimationProblem out = problem;
    out.partialled = true;
    return out;
  }
  EstimationProblem out;
  out.X = problem.X;
  out.x_labels = problem.x_labels;
  out.labels = problem.labels;
  out.y = partial_out(problem.y, problem.X);
  out.Y = partial_out(problem.Y, problem.X);
  out.Z = standardize_columns(partial_out(problem.Z, problem.X)).values;
  out.partialled = true;
  return out;
}

// --------------------------------------------------------------------------

static bool iequals(const std::string& a, const char* b) {
  std::string t = a;
  for (char& c : t) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return t == b;
}

static double parse_value(const std::string& text, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (...) {
  }
  throw data_error("cannot parse value '" + text + "' at " + where);
}

std::vector<RawSeries> read_panel_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.size() < 2) throw data_error(path.string() + ": no data rows");
  const auto& header = rows[0];
  if (header.size() < 2) throw data_error(path.string() + ": bad header");

  std::vector<RawSeries> panel;
  if (header.size() == 3 && iequals(header[1], "code") &&
      iequals(header[2], "value")) {
    // long format; rows may arrive unordered
    std::map<std::string, std::map<int, double>> by_code;
    std::map<std::string, std::size_t> order;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != 3)
        throw data_error(path.string() + ": row " + std::to_string(i + 1) +
                         " has " + std::to_string(rows[i].size()) + " fields");
      Quarter q = Quarter::parse(rows[i][0]);
      const std::string& code = rows[i][1];
      order.emplace(code, order.size());
      by_code[code][q.index()] =
          parse_value(rows[i][2], code + " " + q.str());
    }
    panel.resize(by_code.size());
    for (const auto& [code, obs] : by_code) {
      RawSeries s;
      s.code = code;
      for (const auto& [idx, v] : obs) {
        s.dates.push_back(Quarter::from_index(idx));
        s.values.push_back(v);
      }
      s.validate();
      panel[order[code]] = std::move(s);
    }
  } else {
    // wide format: date + one column per code
    panel.resize(header.size() - 1);
    for (std::size_t j = 1; j < header.size(); ++j)
      panel[j - 1].code = header[j];
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != header.size())
        throw data_error(path.string() + ": row " + std::to_string(i + 1) +
                         " width mismatch");
      Quarter q = Quarter::parse(rows[i][0]);
      for (std::size_t j = 1; j < header.size(); ++j) {
        if (rows[i][j].empty()) continue;  // leading/trailing NA padding
        panel[j - 1].dates.push_back(q);
        panel[j - 1].values.push_back(
            parse_value(rows[i][j], header[j] + " " + q.str()));
      }
    }
    for (auto& s : panel) s.validate();
  }
  return panel;
}

std::map<std::string, TransformCode> read_transform_map(
    const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  std::map<std::string, TransformCode> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0 && rows[i].size() >= 2 && iequals(rows[i][0], "code")) continue;
    if (rows[i].size() < 2)
      throw data_error(path.string() + ": row " + std::to_string(i + 1) +
                       " needs code,transform");
    out[rows[i][0]] = parse_transform_code(rows[i][1]);
  }
  return out;
}

static const RawSeries* find_series(const std::vector<RawSeries>& panel,
                                    const std::string& code) {
  for (const auto& s : panel)
    if (s.code == code) return &s;
  return nullptr;
}

EstimationProblem assemble_empirical_design(const EmpiricalConfig& config,
                                            const std::vector<RawSeries>& panel) {
  if (!find_series(panel, config.dependent_code))
    throw data_error("missing dependent series " + config.dependent_code);
  if (!find_series(panel, config.forcing_code))
    throw data_error("missing forcing series " + config.forcing_code);

  std::vector<RawSeries> transformed;
  transformed.reserve(panel.size());
  for (const auto& s : panel) {
    auto it = config.transforms.find(s.code);
    if (it == config.transforms.end())
      throw data_error("no transform configured for series " + s.code);
    transformed.push_back(apply_transform(s, it->second));
  }
  transformed = align_panel(transformed);

  LagMatrix lagged = build_lag_matrix(transformed, config.lags);
  const RawSeries* pi = find_series(transformed, config.dependent_code);
  const RawSeries* forcing = find_series(transformed, config.forcing_code);

  // Usable dates: inside the window, all lags available, lead available.
  const int panel_start = transformed[0].dates.front().index();
  const int panel_end = transformed[0].dates.back().index();
  const int t0 = std::max(config.window_start.index(), panel_start + config.lags);
  const int t1 = std::min(config.window_end.index(), panel_end - 1);
  const int T = t1 - t0 + 1;
  if (T < 3 + config.lags)
    throw data_error("window " + Quarter::from_index(t0).str() + ".." +
                     Quarter::from_index(t1).str() + " yields only " +
                     std::to_string(std::max(T, 0)) + " usable rows");

  auto slice = [&](const RawSeries& s, int shift) {
    Vector v(T);
    int base = t0 - panel_start + shift;
    for (int t = 0; t < T; ++t) v[t] = s.values[static_cast<std::size_t>(base + t)];
    return v;
  };

  Vector pi_t = slice(*pi, 0);
  Vector pi_lead = slice(*pi, +1);
  Vector pi_lag = slice(*pi, -1);
  Vector s_t = slice(*forcing, 0);

  // Lag-matrix rows start at panel_start + lags.
  const int row0 = t0 - (panel_start + config.lags);
  const std::string drop_label = config.dependent_code + ".-1";
  std::vector<int> keep;
  std::vector<std::string> labels;
  for (int j = 0; j < lagged.values.cols(); ++j) {
    if (lagged.labels[static_cast<std::size_t>(j)] == drop_label) continue;
    keep.push_back(j);
    labels.push_back(lagged.labels[static_cast<std::size_t>(j)]);
  }
  Matrix Ztilde(T, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    Ztilde.col(static_cast<Eigen::Index>(j)) =
        lagged.values.col(keep[j]).segment(row0, T);

  EstimationProblem out;
  out.X.resize(T, 2);
  out.X.col(0).setOnes();
  out.X.col(1) = pi_lag;
  out.x_labels = {"const", drop_label};
  out.labels = std::move(labels);
  // k >= p1 + p2 in the convention where k counts the included exogenous
  // columns: excluded instruments must cover the endogenous count
  if (out.labels.size() < 2)
    throw data_error("instrument list too small: k=" +
                     std::to_string(out.labels.size() + 2) + " < p1+p2");
  out.y = partial_out(pi_t, out.X);
  Matrix Yraw(T, 2);
  Yraw.col(0) = s_t;
  Yraw.col(1) = pi_lead;
  out.Y = partial_out(Yraw, out.X);
  out.Z = standardize_columns(partial_out(Ztilde, out.X)).values;
  out.partialled = true;
  return out;
}

void write_design_bundle(const EstimationProblem& problem,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  auto dump = [&](const Matrix& m, const std::string& name,
                  const std::vector<std::string>& header) {
    std::vector<csv::Row> rows;
    if (!header.empty()) rows.push_back(header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      csv::Row row;
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(fmt(m(i, j)));
      rows.push_back(std::move(row));
    }
    csv::write_file(dir / name, rows);
  };
  dump(problem.y, "y.csv", {"y"});
  dump(problem.Y, "Y.csv", {});
  dump(problem.X, "X.csv", problem.x_labels);
  dump(problem.Z, "Z.csv", {});
  std::vector<csv::Row> label_rows{{"label"}};
  for (const auto& l : problem.labels) label_rows.push_back({l});
  csv::write_file(dir / "labels.csv", label_rows);
}

}  // namespace manyiv
