#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

#include "kpi/field.hpp"

namespace kpi {

// CSV dump: header "x,y,value", rows y-outer / x-inner.
// Binary dump: little-endian float64 nx, lx, ny followed by nx*ny values in the same order.

inline void write_csv(std::ostream& os, const Field& f) {
  os << "x,y,value\n";
  os << std::setprecision(17);
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) os << f.grid.x(i) << ',' << f.grid.y(j) << ',' << f(i, j) << '\n';
}

inline void write_csv(std::ostream& os, const Profile1D& p) {
  os << "x,value\n";
  os << std::setprecision(17);
  for (int i = 0; i < p.grid.nx; ++i) os << p.grid.x(i) << ',' << p[i] << '\n';
}

namespace detail {

inline void put_le_double(std::ostream& os, double v) {
  static_assert(sizeof(double) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  os.write(buf, 8);
}

inline double get_le_double(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw std::runtime_error("read_binary: truncated field dump");
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

inline void write_binary(std::ostream& os, const Field& f) {
  detail::put_le_double(os, f.grid.nx);
  detail::put_le_double(os, f.grid.lx);
  detail::put_le_double(os, f.grid.ny);
  for (double v : f.values) detail::put_le_double(os, v);
}

inline Field read_binary(std::istream& is) {
  const double nx = detail::get_le_double(is);
  const double lx = detail::get_le_double(is);
  const double ny = detail::get_le_double(is);
  if (nx != std::floor(nx) || ny != std::floor(ny) || nx < 1 || ny < 1) {
    throw std::runtime_error("read_binary: malformed header");
  }
  Field f(make_grid(static_cast<int>(nx), lx, static_cast<int>(ny)));
  for (double& v : f.values) v = detail::get_le_double(is);
  return f;
}

/// Reads a CSV dump; the grid is recovered from the distinct coordinates.
inline Field read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y,value", 0) != 0) {
    throw std::runtime_error("read_csv: expected header x,y,value");
  }
  std::vector<double> xs, ys, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, y, v;
    char c1, c2;
    if (!(ss >> x >> c1 >> y >> c2 >> v) || c1 != ',' || c2 != ',') {
      throw std::runtime_error("read_csv: malformed row: " + line);
    }
    xs.push_back(x);
    ys.push_back(y);
    vs.push_back(v);
  }
  if (xs.size() < 2) throw std::runtime_error("read_csv: too few rows");
  std::size_t nx = 1;
  while (nx < ys.size() && ys[nx] == ys[0]) ++nx;
  if (vs.size() % nx != 0) throw std::runtime_error("read_csv: ragged dump");
  const std::size_t ny = vs.size() / nx;
  const double dx = xs[1] - xs[0];
  const double lx = dx * static_cast<double>(nx);
  Field f(make_grid(static_cast<int>(nx), lx, static_cast<int>(ny)), std::move(vs));
  return f;
}

inline void save_field(const std::string& path, const Field& f) {
  const bool binary = path.size() >= 4 && path.substr(path.size() - 4) == ".bin";
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  if (binary) {
    write_binary(os, f);
  } else {
    write_csv(os, f);
  }
}

inline Field load_field(const std::string& path) {
  const bool binary = path.size() >= 4 && path.substr(path.size() - 4) == ".bin";
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw std::runtime_error("cannot open " + path);
  return binary ? read_binary(is) : read_csv(is);
}

}  // namespace kpi
