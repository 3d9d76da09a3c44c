#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>

#include "morselab/grid.hpp"

namespace morselab {

nlohmann::json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

/// {"spec": {...}, "values": [...]}
nlohmann::json field_to_json(const Grid& grid, const Field& u);

/// Inverse of field_to_json; the grid is rebuilt from the embedded spec.
std::pair<Grid, Field> field_from_json(const nlohmann::json& j);

/// Rows of (x[, y], value) with a header line.
void write_field_csv(std::ostream& os, const Grid& grid, const Field& u);
void write_field_csv(const std::string& path, const Grid& grid, const Field& u);

}  // namespace morselab
