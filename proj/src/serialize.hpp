#pragma once

// Output formats: CSV tables, binary PGM rasters and JSON documents. Every file
// carries the resolved configuration and the library version.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace tractlab {

const char* library_version();

/// Shortest representation that reads back to the same double; "inf", "-inf"
/// and "nan" for non-finite values.
std::string csv_number(double x);

struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

/// Header comment lines with version and config, then a header row and one
/// row per index. Columns must have equal length.
std::string write_csv(const std::vector<CsvColumn>& columns, const nlohmann::json& config);

/// Binary P5 image, rows written top to bottom.
std::string write_pgm(const std::vector<std::uint8_t>& pixels, int width, int height,
                      const nlohmann::json& config);

/// Two-space indented JSON with sorted keys and a trailing newline.
std::string write_json(const nlohmann::json& document);

}  // namespace tractlab
