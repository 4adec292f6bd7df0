#include "manyiv/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "manyiv/errors.hpp"

namespace manyiv {

using nlohmann::json;

std::vector<DgpCalibration> CalibrationFile::cells() const {
  auto or_base = [](const std::vector<double>& v, double fallback) {
    return v.empty() ? std::vector<double>{fallback} : v;
  };
  std::vector<DgpCalibration> out;
  for (double a23 : or_base(a23_cells, base.a23))
    for (double a21 : or_base(a21_cells, base.a21))
      for (double a22 : or_base(a22_cells, base.a22)) {
        DgpCalibration c = base;
        c.a21 = a21;
        c.a22 = a22;
        c.a23 = a23;
        out.push_back(c);
      }
  return out;
}

CalibrationFile load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open calibration file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw config_error("calibration file " + path.string() + ": " + e.what());
  }

  CalibrationFile file;
  DgpCalibration& c = file.base;
  try {
    auto get = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("gamma_f", c.gamma_f);
    get("lambda", c.lambda);
    get("T", c.T);
    get("a21", c.a21); get("a22", c.a22); get("a23", c.a23);
    get("a31", c.a31); get("a32", c.a32); get("a33", c.a33);
    get("w11", c.w11); get("w12", c.w12); get("w13", c.w13);
    get("w22", c.w22); get("w23", c.w23); get("w33", c.w33);
    get("m", c.m);
    get("tau", c.tau);
    get("burn_in", c.burn_in);
    get("seed", c.seed);
    get("a21_cells", file.a21_cells);
    get("a22_cells", file.a22_cells);
    get("a23_cells", file.a23_cells);
  } catch (const json::exception& e) {
    throw config_error("calibration file " + path.string() + ": " + e.what());
  }
  return file;
}

std::string calibration_to_json(const DgpCalibration& c) {
  json doc{{"gamma_f", c.gamma_f}, {"lambda", c.lambda}, {"T", c.T},
           {"a21", c.a21},         {"a22", c.a22},       {"a23", c.a23},
           {"a31", c.a31},         {"a32", c.a32},       {"a33", c.a33},
           {"w11", c.w11},         {"w12", c.w12},       {"w13", c.w13},
           {"w22", c.w22},         {"w23", c.w23},       {"w33", c.w33},
           {"m", c.m},             {"tau", c.tau},       {"burn_in", c.burn_in},
           {"seed", c.seed}};
  return doc.dump(2);
}

HypothesisGrid parse_grid_spec(const std::string& spec) {
  // "gf_min:gf_max:gf_step,lam_min:lam_max:lam_step"
  HypothesisGrid grid;
  auto comma = spec.find(',');
  if (comma == std::string::npos)
    throw config_error("grid spec '" + spec +
                       "' (want gfmin:gfmax:gfstep,lammin:lammax:lamstep)");
  auto parse_axis = [&](const std::string& axis, double& lo, double& hi,
                        double& step) {
    std::istringstream is(axis);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(is, tok, ':')) {
      try {
        vals.push_back(std::stod(tok));
      } catch (...) {
        throw config_error("grid spec: cannot parse '" + tok + "'");
      }
    }
    if (vals.size() != 3)
      throw config_error("grid spec axis '" + axis + "' needs min:max:step");
    lo = vals[0];
    hi = vals[1];
    step = vals[2];
    if (step <= 0 || hi < lo)
      throw config_error("grid spec axis '" + axis + "' is not increasing");
  };
  parse_axis(spec.substr(0, comma), grid.gf_min, grid.gf_max, grid.gf_step);
  parse_axis(spec.substr(comma + 1), grid.lam_min, grid.lam_max, grid.lam_step);
  return grid;
}

std::string grid_to_string(const HypothesisGrid& grid) {
  std::ostringstream os;
  os << grid.gf_min << ":" << grid.gf_max << ":" << grid.gf_step << ","
     << grid.lam_min << ":" << grid.lam_max << ":" << grid.lam_step;
  return os.str();
}

}  // namespace manyiv
