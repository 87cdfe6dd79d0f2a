#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "kpi/grid.hpp"

namespace kpi {

/// Real samples on a 2-D grid, y-outer / x-inner.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("Field: value count does not match grid");
  }

  template <class F>
  static Field sample(const Grid& g, F&& f) {
    Field out(g);
    for (int j = 0; j < g.ny; ++j) {
      const double y = g.y(j);
      for (int i = 0; i < g.nx; ++i) out.values[j * g.nx + i] = f(g.x(i), y);
    }
    return out;
  }

  double& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
  double operator()(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }

  std::span<double> line(int j) { return {values.data() + static_cast<std::size_t>(j) * grid.nx, static_cast<std::size_t>(grid.nx)}; }
  std::span<const double> line(int j) const {
    return {values.data() + static_cast<std::size_t>(j) * grid.nx, static_cast<std::size_t>(grid.nx)};
  }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
    return *this;
  }
  Field& operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
  }

  /// Adds s * o in place.
  Field& axpy(double s, const Field& o) {
    check_same(o);
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += s * o.values[k];
    return *this;
  }

  void check_same(const Field& o) const {
    if (!(grid == o.grid)) throw std::invalid_argument("Field: grid mismatch");
  }

  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

inline Field operator+(Field a, const Field& b) { return a += b; }
inline Field operator-(Field a, const Field& b) { return a -= b; }
inline Field operator*(double s, Field a) { return a *= s; }
inline Field operator*(Field a, double s) { return a *= s; }

/// Pointwise product.
inline Field hadamard(Field a, const Field& b) {
  a.check_same(b);
  for (std::size_t k = 0; k < a.values.size(); ++k) a.values[k] *= b.values[k];
  return a;
}

/// Real samples of a function of x alone; only the x-axis of the grid is used.
struct Profile1D {
  Grid grid;
  std::vector<double> values;

  Profile1D() = default;
  explicit Profile1D(const Grid& g, double fill = 0.0) : grid(g), values(static_cast<std::size_t>(g.nx), fill) {}
  Profile1D(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != static_cast<std::size_t>(grid.nx)) {
      throw std::invalid_argument("Profile1D: value count does not match grid");
    }
  }

  template <class F>
  static Profile1D sample(const Grid& g, F&& f) {
    Profile1D out(g);
    for (int i = 0; i < g.nx; ++i) out.values[i] = f(g.x(i));
    return out;
  }

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }

  Profile1D& operator+=(const Profile1D& o) {
    for (std::size_t k = 0; k < values.size(); ++k) values[k] += o.values[k];
    return *this;
  }
  Profile1D& operator-=(const Profile1D& o) {
    for (std::size_t k = 0; k < values.size(); ++k) values[k] -= o.values[k];
    return *this;
  }
  Profile1D& operator*=(double s) {
    for (double& v : values) v *= s;
    return *this;
  }

  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
  }
};

inline Profile1D operator+(Profile1D a, const Profile1D& b) { return a += b; }
inline Profile1D operator-(Profile1D a, const Profile1D& b) { return a -= b; }
inline Profile1D operator*(double s, Profile1D a) { return a *= s; }

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
inline double max_abs(const Field& f) { return max_abs(f.values); }
inline double max_abs(const Profile1D& f) { return max_abs(f.values); }

/// Field whose every y-line equals the profile.
inline Field extend_in_y(const Profile1D& p, const Grid& g) {
  Field out(g);
  for (int j = 0; j < g.ny; ++j) std::copy(p.values.begin(), p.values.end(), out.line(j).begin());
  return out;
}

/// Field p(x) * cos(m y) or p(x) * sin(m y).
inline Field times_cos_y(const Profile1D& p, const Grid& g, int m = 1) {
  Field out(g);
  for (int j = 0; j < g.ny; ++j) {
    const double cy = std::cos(m * g.y(j));
    for (int i = 0; i < g.nx; ++i) out(i, j) = p[i] * cy;
  }
  return out;
}
inline Field times_sin_y(const Profile1D& p, const Grid& g, int m = 1) {
  Field out(g);
  for (int j = 0; j < g.ny; ++j) {
    const double sy = std::sin(m * g.y(j));
    for (int i = 0; i < g.nx; ++i) out(i, j) = p[i] * sy;
  }
  return out;
}

/// Exact index rotation by `steps` grid points in y: out(y_j) = f(y_{j-steps}).
inline Field rotate_y(const Field& f, int steps) {
  const int ny = f.grid.ny;
  Field out(f.grid);
  for (int j = 0; j < ny; ++j) {
    const int src = ((j - steps) % ny + ny) % ny;
    std::copy(f.line(src).begin(), f.line(src).end(), out.line(j).begin());
  }
  return out;
}

}  // namespace kpi
