#pragma once

// CSV, PGM and JSON output. Files are written to a temporary sibling and
// renamed into place.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qcarpet/wavefield.hpp"

namespace qcarpet::cli {

/// Shortest form with 17 significant digits.
std::string format_double(double v);

struct CsvColumn {
  std::string name;
  std::span<const double> values;
};

/// Header row then one row per sample; LF line endings.
std::string csv_columns(std::span<const CsvColumn> columns);

/// Header "t" followed by every x node; one row per time node, ascending t.
std::string csv_matrix(const wavefield::CarpetField& field);

/// Binary P5, 16-bit big-endian, top row = largest t, values
/// round(P / max P * 65535).
std::string pgm_image(const wavefield::CarpetField& field);

void write_atomic(const std::filesystem::path& path, const std::string& data);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace qcarpet::cli
