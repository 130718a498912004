#include "serialize.hpp"

#include <charconv>
#include <cmath>

#include "tractlab/error.hpp"

#ifndef TRACTLAB_VERSION
#define TRACTLAB_VERSION "unknown"
#endif

namespace tractlab {

const char* library_version() { return TRACTLAB_VERSION; }

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string write_csv(const std::vector<CsvColumn>& columns, const nlohmann::json& config) {
  if (columns.empty()) fail(ErrorCode::Internal, "CSV needs at least one column");
  const std::size_t rows = columns.front().values.size();
  for (const CsvColumn& c : columns)
    if (c.values.size() != rows) fail(ErrorCode::Internal, "CSV columns differ in length");

  std::string out = "# tractlab " + std::string(library_version()) + "\n";
  out += "# config " + config.dump() + "\n";
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (k) out += ',';
    out += columns[k].name;
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) out += ',';
      out += csv_number(columns[k].values[i]);
    }
    out += '\n';
  }
  return out;
}

std::string write_pgm(const std::vector<std::uint8_t>& pixels, int width, int height,
                      const nlohmann::json& config) {
  if (width <= 0 || height <= 0 || pixels.size() != static_cast<std::size_t>(width) * height)
    fail(ErrorCode::Internal, "raster size does not match its dimensions");
  std::string out = "P5\n# tractlab " + std::string(library_version()) + "\n";
  out += "# config " + config.dump() + "\n";
  out += std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  return out;
}

std::string write_json(const nlohmann::json& document) { return document.dump(2) + "\n"; }

}  // namespace tractlab
