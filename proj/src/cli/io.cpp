#include "qcarpet/cli/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qcarpet/errors.hpp"

namespace qcarpet::cli {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_columns(std::span<const CsvColumn> columns) {
  if (columns.empty()) return {};
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns) {
    if (c.values.size() != rows) throw DomainError("csv columns differ in length");
  }
  std::string out;
  out.reserve((rows + 1) * columns.size() * 24);
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) out += ',';
    out += columns[j].name;
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out += ',';
      out += format_double(columns[j].values[i]);
    }
    out += '\n';
  }
  return out;
}

std::string csv_matrix(const wavefield::CarpetField& field) {
  std::string out;
  out.reserve((field.nt() + 1) * (field.nx() + 1) * 24);
  out += 't';
  for (double x : field.x_grid) {
    out += ',';
    out += format_double(x);
  }
  out += '\n';
  for (std::size_t it = 0; it < field.nt(); ++it) {
    out += format_double(field.t_grid[it]);
    for (std::size_t ix = 0; ix < field.nx(); ++ix) {
      out += ',';
      out += format_double(field(it, ix));
    }
    out += '\n';
  }
  return out;
}

std::string pgm_image(const wavefield::CarpetField& field) {
  const std::size_t nx = field.nx(), nt = field.nt();
  double peak = 0.0;
  for (double v : field.values) peak = std::max(peak, v);
  std::string out = "P5\n" + std::to_string(nx) + " " + std::to_string(nt) + "\n65535\n";
  const std::size_t header = out.size();
  out.resize(header + 2 * nx * nt);
  std::size_t pos = header;
  for (std::size_t r = 0; r < nt; ++r) {
    const std::size_t it = nt - 1 - r;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double v = peak > 0.0 ? std::clamp(field(it, ix) / peak, 0.0, 1.0) : 0.0;
      const auto level = static_cast<unsigned>(std::lround(v * 65535.0));
      out[pos++] = static_cast<char>((level >> 8) & 0xff);
      out[pos++] = static_cast<char>(level & 0xff);
    }
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& data) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(f, line)) throw IoError(path.string() + ": empty file");
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) table.header.push_back(name);
  }
  table.columns.resize(table.header.size());
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc{}) {
        throw IoError(path.string() + ": bad number at row " + std::to_string(row));
      }
      table.columns[j].push_back(v);
      p = res.ptr;
      if (j + 1 < table.header.size()) {
        if (p == end || *p != ',') {
          throw IoError(path.string() + ": too few fields at row " + std::to_string(row));
        }
        ++p;
      }
    }
    if (p != end) throw IoError(path.string() + ": extra fields at row " + std::to_string(row));
  }
  return table;
}

}  // namespace qcarpet::cli
