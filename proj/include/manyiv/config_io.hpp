#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "manyiv/inference.hpp"
#include "manyiv/nkpc.hpp"

namespace manyiv {

// Calibration document: the base DGP parameters plus optional cell sweeps
// (a21_cells, a22_cells, a23_cells) expanded in panel order a23 > a21 > a22.
struct CalibrationFile {
  DgpCalibration base;
  std::vector<double> a21_cells;
  std::vector<double> a22_cells;
  std::vector<double> a23_cells;

  std::vector<DgpCalibration> cells() const;
};

CalibrationFile load_calibration(const std::filesystem::path& path);
std::string calibration_to_json(const DgpCalibration& calib);

HypothesisGrid parse_grid_spec(const std::string& spec);
std::string grid_to_string(const HypothesisGrid& grid);

}  // namespace manyiv
