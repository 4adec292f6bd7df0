#pragma once

#include <filesystem>
#include <vector>

#include "manyiv/inference.hpp"
#include "manyiv/nkpc.hpp"

namespace manyiv {

// Tidy per-cell results: one row per (cell, method, metric).
void write_size_results_csv(const std::filesystem::path& path,
                            const std::vector<CampaignResult>& cells);

// Fixed-layout table: panels by a23, columns by (a21, a22) cells, rows for
// mu2 and each method's R.F. / T.S.
void write_table_layout_csv(const std::filesystem::path& path,
                            const std::vector<CampaignResult>& cells);

void write_concentration_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<DgpCalibration, ConcentrationReport>>& reports);

void write_heatmap_csv(const std::filesystem::path& path,
                       const std::vector<PowerPoint>& points);

void write_confidence_grid_csv(const std::filesystem::path& path,
                               const ConfidenceGrid& grid);

// label,count histogram of the instruments attaining the Sup Score max,
// sorted by count descending.
void write_argmax_histogram_csv(const std::filesystem::path& path,
                                const ConfidenceGrid& grid);

void write_selected_csv(const std::filesystem::path& path,
                        const std::vector<int>& indices,
                        const std::vector<std::string>& labels);

void write_bootstrap_draws_csv(const std::filesystem::path& path,
                               const std::vector<double>& draws);

}  // namespace manyiv
