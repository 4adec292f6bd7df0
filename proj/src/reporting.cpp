#include "manyiv/reporting.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "manyiv/csv.hpp"

namespace manyiv {

namespace {

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

}  // namespace

void write_size_results_csv(const std::filesystem::path& path,
                            const std::vector<CampaignResult>& cells) {
  std::vector<csv::Row> rows;
  rows.push_back({"a21", "a22", "a23", "mu2_oracle", "mu2_observed", "method",
                  "nrep", "rf", "ts", "rf_se", "failures"});
  for (const auto& cell : cells) {
    for (const auto& m : cell.methods) {
      rows.push_back({num(cell.calib.a21), num(cell.calib.a22),
                      num(cell.calib.a23), num(cell.mu2_oracle),
                      num(cell.mu2_observed), m.method, std::to_string(m.n),
                      num(m.rf()), m.has_two_step ? num(m.ts()) : "",
                      num(m.rf_se()), std::to_string(m.failures)});
    }
  }
  csv::write_file(path, rows);
}

void write_table_layout_csv(const std::filesystem::path& path,
                            const std::vector<CampaignResult>& cells) {
  // group by a23 panel, preserving first-appearance order
  std::vector<double> panels;
  for (const auto& cell : cells)
    if (std::find(panels.begin(), panels.end(), cell.calib.a23) == panels.end())
      panels.push_back(cell.calib.a23);

  std::vector<csv::Row> rows;
  for (double a23 : panels) {
    std::vector<const CampaignResult*> panel_cells;
    for (const auto& cell : cells)
      if (cell.calib.a23 == a23) panel_cells.push_back(&cell);

    csv::Row header{"a23=" + num(a23)};
    csv::Row row21{"a21"}, row22{"a22"}, mu_o{"mu2_O"}, mu_e{"mu2_E"};
    for (const auto* cell : panel_cells) {
      header.push_back("");
      row21.push_back(num(cell->calib.a21));
      row22.push_back(num(cell->calib.a22));
      mu_o.push_back(num(cell->mu2_oracle, 9));
      mu_e.push_back(num(cell->mu2_observed, 9));
    }
    rows.push_back(header);
    rows.push_back(row21);
    rows.push_back(row22);
    rows.push_back(mu_o);
    rows.push_back(mu_e);

    std::vector<std::string> methods;
    for (const auto* cell : panel_cells)
      for (const auto& m : cell->methods)
        if (std::find(methods.begin(), methods.end(), m.method) == methods.end())
          methods.push_back(m.method);

    for (const auto& name : methods) {
      csv::Row rf_row{name + "_RF"}, ts_row{name + "_TS"};
      bool any_ts = false;
      for (const auto* cell : panel_cells) {
        const MethodFrequency* found = nullptr;
        for (const auto& m : cell->methods)
          if (m.method == name) found = &m;
        rf_row.push_back(found ? num(found->rf()) : "");
        if (found && found->has_two_step) {
          ts_row.push_back(num(found->ts()));
          any_ts = true;
        } else {
          ts_row.push_back("-");
        }
      }
      rows.push_back(rf_row);
      if (any_ts) rows.push_back(ts_row);
    }
  }
  csv::write_file(path, rows);
}

void write_concentration_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<DgpCalibration, ConcentrationReport>>& reports) {
  std::vector<csv::Row> rows;
  rows.push_back({"a21", "a22", "a23", "mu2_oracle", "mu2_observed"});
  for (const auto& [calib, rep] : reports)
    rows.push_back({num(calib.a21), num(calib.a22), num(calib.a23),
                    num(rep.mu2_oracle, 9),
                    rep.has_observed ? num(rep.mu2_observed, 9) : ""});
  csv::write_file(path, rows);
}

void write_heatmap_csv(const std::filesystem::path& path,
                       const std::vector<PowerPoint>& points) {
  std::vector<csv::Row> rows;
  rows.push_back({"gamma_f", "lambda", "frequency", "rejections", "n", "failures"});
  for (const auto& pt : points)
    rows.push_back({num(pt.gamma_f), num(pt.lambda),
                    num(pt.n ? double(pt.rejections) / pt.n : 0.0),
                    std::to_string(pt.rejections), std::to_string(pt.n),
                    std::to_string(pt.failures)});
  csv::write_file(path, rows);
}

void write_confidence_grid_csv(const std::filesystem::path& path,
                               const ConfidenceGrid& grid) {
  std::vector<csv::Row> rows;
  rows.push_back({"gamma_f", "lambda", "statistic", "critical_value", "reject",
                  "in_set", "status", "argmax"});
  const auto pts = grid.grid.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& out = grid.results[i];
    rows.push_back({num(pts[i].gamma_f), num(pts[i].lambda),
                    num(out.result.statistic), num(out.result.critical_value),
                    out.result.reject ? "1" : "0", grid.mask[i] ? "1" : "0",
                    out.failed ? "failed" : "ok", out.result.argmax_label});
  }
  csv::write_file(path, rows);
}

void write_argmax_histogram_csv(const std::filesystem::path& path,
                                const ConfidenceGrid& grid) {
  std::map<std::string, int> counts;
  for (const auto& out : grid.results)
    if (!out.failed && !out.result.argmax_label.empty())
      ++counts[out.result.argmax_label];
  std::vector<std::pair<std::string, int>> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<csv::Row> rows;
  rows.push_back({"label", "count"});
  for (const auto& [label, count] : sorted)
    rows.push_back({label, std::to_string(count)});
  csv::write_file(path, rows);
}

void write_selected_csv(const std::filesystem::path& path,
                        const std::vector<int>& indices,
                        const std::vector<std::string>& labels) {
  std::vector<csv::Row> rows;
  rows.push_back({"index", "label"});
  for (std::size_t i = 0; i < indices.size(); ++i)
    rows.push_back({std::to_string(indices[i]),
                    i < labels.size() ? labels[i] : ""});
  csv::write_file(path, rows);
}

void write_bootstrap_draws_csv(const std::filesystem::path& path,
                               const std::vector<double>& draws) {
  std::vector<csv::Row> rows;
  rows.push_back({"replicate", "value"});
  for (std::size_t b = 0; b < draws.size(); ++b)
    rows.push_back({std::to_string(b), num(draws[b], 12)});
  csv::write_file(path, rows);
}

}  // namespace manyiv
