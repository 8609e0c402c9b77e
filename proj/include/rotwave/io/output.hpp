#pragma once

// Deterministic flat-file emission: CSV matrices with fixed 17-significant-
// digit formatting and LF line endings, JSON metadata sidecars, atomic
// writes via temp file + rename.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rotwave::io {

using json = nlohmann::json;

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty()
                                          ? "."
                                          : path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

// Matrix CSV in pivot layout: the first cell names both axes
// ("row_label\col_label"), the first row carries the column coordinates,
// the first column the row coordinates.
inline void write_csv_matrix(const std::filesystem::path& path,
                             const std::string& row_label,
                             const std::string& col_label,
                             const std::vector<double>& row_coords,
                             const std::vector<double>& col_coords,
                             const std::vector<double>& values) {
  if (values.size() != row_coords.size() * col_coords.size())
    throw std::invalid_argument("write_csv_matrix: size mismatch");
  std::string s;
  s.reserve(values.size() * 20);
  s += row_label;
  s += '\\';
  s += col_label;
  for (double c : col_coords) {
    s += ',';
    s += format_g17(c);
  }
  s += '\n';
  for (std::size_t i = 0; i < row_coords.size(); ++i) {
    s += format_g17(row_coords[i]);
    for (std::size_t j = 0; j < col_coords.size(); ++j) {
      s += ',';
      s += format_g17(values[i * col_coords.size() + j]);
    }
    s += '\n';
  }
  atomic_write(path, s);
}

// Column-oriented CSV: header line then rows of pre-formatted cells.
inline void write_csv_table(const std::filesystem::path& path,
                            const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) s += ',';
    s += header[i];
  }
  s += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv_table: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += ',';
      s += row[i];
    }
    s += '\n';
  }
  atomic_write(path, s);
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace rotwave::io
