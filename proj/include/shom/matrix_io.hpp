#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "format.hpp"
#include "frame_io.hpp"
#include "interference.hpp"

namespace shom {

// CSV matrix: an optional metadata line
//   # kind=<map kind> n_frames=<N>
// then two header lines with the axis bin centers in nm,
//   lambda_plus_nm,<l0>,<l1>,...
//   lambda_minus_nm,<l0>,<l1>,...
// followed by one row per lambda_plus bin. Values use shortest round-trip
// formatting, so write/read is exact.

namespace detail {

inline void write_axis(std::ostream& os, const char* name, const WavelengthGrid& g) {
  os << name;
  for (std::size_t i = 0; i < g.size(); ++i) os << ',' << format_double(g.center_nm(i));
  os << '\n';
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cells.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cells;
}

inline WavelengthGrid read_axis(const std::string& line, const char* name, int line_no) {
  const auto cells = split_csv(line);
  if (cells.empty() || cells[0] != name)
    throw FormatError("line " + std::to_string(line_no) + ": expected header '" + name + "'");
  std::vector<double> centers;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto v = parse_double(cells[i]);
    if (!v) throw FormatError("line " + std::to_string(line_no) + ": bad wavelength '" + std::string(cells[i]) + "'");
    centers.push_back(*v);
  }
  if (centers.size() < 2) throw FormatError("line " + std::to_string(line_no) + ": axis needs >= 2 bins");
  const double step = (centers.back() - centers.front()) / static_cast<double>(centers.size() - 1);
  for (std::size_t i = 0; i < centers.size(); ++i)
    if (std::abs(centers[i] - (centers.front() + static_cast<double>(i) * step)) > 1e-6 * std::abs(step))
      throw FormatError("line " + std::to_string(line_no) + ": axis is not uniformly spaced");
  try {
    return {centers.front() * units::nm, step * units::nm, centers.size()};
  } catch (const InvalidArgument& e) {
    throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

}  // namespace detail

inline void write_matrix_csv(std::ostream& os, const CoincidenceMap& map) {
  os << "# kind=" << to_string(map.kind) << " n_frames=" << map.n_frames << '\n';
  detail::write_axis(os, "lambda_plus_nm", map.grid_p);
  detail::write_axis(os, "lambda_minus_nm", map.grid_m);
  for (std::size_t a = 0; a < map.values.rows(); ++a) {
    const auto row = map.values.row(a);
    for (std::size_t b = 0; b < row.size(); ++b) {
      if (b) os << ',';
      os << format_double(row[b]);
    }
    os << '\n';
  }
}

inline CoincidenceMap read_matrix_csv(std::istream& is, MapKind kind = MapKind::probability) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty matrix file");
  int offset = 0;
  std::uint64_t n_frames = 0;
  if (trim(line).starts_with('#')) {
    offset = 1;
    std::istringstream meta(std::string(trim(line).substr(1)));
    std::string field;
    while (meta >> field) {
      const auto eq = field.find('=');
      const std::string key = field.substr(0, eq), value = eq == field.npos ? "" : field.substr(eq + 1);
      if (key == "kind") {
        const auto k = map_kind_from_string(value);
        if (!k) throw FormatError("line 1: unknown map kind '" + value + "'");
        kind = *k;
      } else if (key == "n_frames") {
        const auto v = parse_int<std::uint64_t>(value);
        if (!v) throw FormatError("line 1: bad n_frames '" + value + "'");
        n_frames = *v;
      } else {
        throw FormatError("line 1: unknown metadata field '" + key + "'");
      }
    }
    if (!std::getline(is, line)) throw FormatError("missing lambda_plus_nm header");
  }
  const WavelengthGrid gp = detail::read_axis(line, "lambda_plus_nm", 1 + offset);
  if (!std::getline(is, line)) throw FormatError("missing lambda_minus_nm header");
  const WavelengthGrid gm = detail::read_axis(line, "lambda_minus_nm", 2 + offset);
  CoincidenceMap map{gp, gm, Matrix<double>(gp.size(), gm.size()), kind, n_frames};
  for (std::size_t a = 0; a < gp.size(); ++a) {
    const int line_no = static_cast<int>(a) + 3 + offset;
    if (!std::getline(is, line)) throw FormatError("line " + std::to_string(line_no) + ": missing matrix row");
    const auto cells = detail::split_csv(line);
    if (cells.size() != gm.size())
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(gm.size()) + " values");
    for (std::size_t b = 0; b < cells.size(); ++b) {
      const auto v = parse_double(cells[b]);
      if (!v) throw FormatError("line " + std::to_string(line_no) + ": bad value '" + std::string(cells[b]) + "'");
      map.values(a, b) = *v;
    }
  }
  while (std::getline(is, line))
    if (!trim(line).empty()) throw FormatError("unexpected data after matrix rows");
  return map;
}

/// Binary matrix "ZHM1": magic, u16 version, u16 kind, the two 24-byte grid
/// descriptors of the frame format, u64 n_frames, then rows*cols f64 row-major.
inline void write_matrix_binary(std::ostream& os, const CoincidenceMap& map) {
  os.write("ZHM1", 4);
  io::put_le<std::uint16_t>(os, 1);
  io::put_le<std::uint16_t>(os, static_cast<std::uint16_t>(map.kind));
  detail::put_grid(os, map.grid_p);
  detail::put_grid(os, map.grid_m);
  io::put_le<std::uint64_t>(os, map.n_frames);
  for (double v : map.values.flat()) io::put_f64(os, v);
  if (!os) throw FormatError("failed writing matrix");
}

inline CoincidenceMap read_matrix_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "ZHM1") throw FormatError("not a ZHM1 matrix file");
  if (io::get_le<std::uint16_t>(is, "version") != 1) throw FormatError("unsupported ZHM1 version");
  const auto kind = io::get_le<std::uint16_t>(is, "kind");
  if (kind > static_cast<std::uint16_t>(MapKind::variance)) throw FormatError("unknown map kind");
  const WavelengthGrid gp = detail::get_grid(is);
  const WavelengthGrid gm = detail::get_grid(is);
  CoincidenceMap map{gp, gm, Matrix<double>(gp.size(), gm.size()), static_cast<MapKind>(kind), 0};
  map.n_frames = io::get_le<std::uint64_t>(is, "frame count");
  for (double& v : map.values.flat()) v = io::get_f64(is, "matrix value");
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after matrix");
  return map;
}

inline bool is_binary_matrix_path(const std::filesystem::path& path) { return path.extension() == ".zhm"; }

/// Writes CSV, or ZHM1 when the extension is ".zhm".
inline void write_matrix(const std::filesystem::path& path, const CoincidenceMap& map) {
  const bool binary = is_binary_matrix_path(path);
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  binary ? write_matrix_binary(os, map) : write_matrix_csv(os, map);
}

inline CoincidenceMap read_matrix(const std::filesystem::path& path, MapKind csv_kind = MapKind::probability) {
  const bool binary = is_binary_matrix_path(path);
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw FormatError("cannot open " + path.string());
  try {
    return binary ? read_matrix_binary(is) : read_matrix_csv(is, csv_kind);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace shom
