#include "morselab/field_io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "morselab/error.hpp"

namespace morselab {

nlohmann::json to_json(const GridSpec& spec) {
  nlohmann::json j;
  j["dim"] = spec.dim;
  auto extents = nlohmann::json::array();
  auto interior = nlohmann::json::array();
  for (int a = 0; a < spec.dim; ++a) {
    extents.push_back(spec.extents[a]);
    interior.push_back(spec.interior[a]);
  }
  j["extents"] = extents;
  j["interior"] = interior;
  return j;
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec spec;
  try {
    spec.dim = j.at("dim").get<int>();
    if (spec.dim != 1 && spec.dim != 2) throw ConfigError("grid.dim must be 1 or 2");
    const auto& ext = j.at("extents");
    const auto& cnt = j.at("interior");
    if (ext.size() != static_cast<std::size_t>(spec.dim) ||
        cnt.size() != static_cast<std::size_t>(spec.dim)) {
      throw ConfigError("grid.extents and grid.interior need one entry per axis");
    }
    for (int a = 0; a < spec.dim; ++a) {
      spec.extents[a] = ext[a].get<double>();
      spec.interior[a] = cnt[a].get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed grid spec: ") + e.what());
  }
  return spec;
}

nlohmann::json field_to_json(const Grid& grid, const Field& u) {
  grid.check_field(u);
  nlohmann::json j;
  j["spec"] = to_json(grid.spec());
  j["values"] = std::vector<double>(u.data(), u.data() + u.size());
  return j;
}

std::pair<Grid, Field> field_from_json(const nlohmann::json& j) {
  Grid grid = build_grid(grid_spec_from_json(j.at("spec")));
  std::vector<double> values;
  try {
    values = j.at("values").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed field values: ") + e.what());
  }
  Field u = Eigen::Map<const Field>(values.data(), static_cast<Eigen::Index>(values.size()));
  grid.check_field(u);
  return {std::move(grid), std::move(u)};
}

void write_field_csv(std::ostream& os, const Grid& grid, const Field& u) {
  grid.check_field(u);
  os << (grid.dim() == 1 ? "x,value\n" : "x,y,value\n");
  os << std::setprecision(17);
  for (std::size_t i = 0; i < grid.dof_count(); ++i) {
    const auto x = grid.node_coordinate(i);
    os << x[0];
    if (grid.dim() == 2) os << ',' << x[1];
    os << ',' << u[static_cast<Eigen::Index>(i)] << '\n';
  }
}

void write_field_csv(const std::string& path, const Grid& grid, const Field& u) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_field_csv(os, grid, u);
}

}  // namespace morselab
