#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kpi {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on [-lx/2, lx/2) x [0, 2π).
///
/// Storage order everywhere in the library is y-outer, x-inner:
/// value (i, j) at x_i, y_j lives at index j * nx + i.
struct Grid {
  int nx = 0;
  double lx = 0.0;
  int ny = 0;

  double dx() const { return lx / nx; }
  double dy() const { return two_pi / ny; }
  double x(int i) const { return -0.5 * lx + i * dx(); }
  double y(int j) const { return j * dy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  /// Number of retained x-coefficients in the real-to-complex layout.
  int nxh() const { return nx / 2 + 1; }

  /// x wavenumber of r2c column p in [0, nx/2].
  double xi(int p) const { return two_pi * p / lx; }

  /// Signed integer y wavenumber of FFT row j; the Nyquist row maps to +ny/2.
  int ky(int j) const { return j <= ny / 2 ? j : j - ny; }

  /// Signed integer x index of a full-length FFT entry (1-D c2c layout).
  int px(int i) const { return i <= nx / 2 ? i : i - nx; }

  double area() const { return lx * two_pi; }

  bool operator==(const Grid&) const = default;
};

namespace detail {

inline bool small_prime_factors(int n) {
  for (int p : {2, 3, 5, 7}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace detail

inline Grid make_grid(int nx, double lx, int ny) {
  if (nx < 8 || ny < 8) {
    throw std::invalid_argument("make_grid: nx and ny must be >= 8 (got " + std::to_string(nx) + ", " +
                                std::to_string(ny) + ")");
  }
  if (nx % 2 != 0 || ny % 2 != 0) {
    throw std::invalid_argument("make_grid: nx and ny must be even (got " + std::to_string(nx) + ", " +
                                std::to_string(ny) + ")");
  }
  if (!detail::small_prime_factors(nx) || !detail::small_prime_factors(ny)) {
    throw std::invalid_argument("make_grid: sizes must factor into 2, 3, 5, 7");
  }
  if (!(lx > 0.0) || !std::isfinite(lx)) {
    throw std::invalid_argument("make_grid: lx must be positive and finite");
  }
  return Grid{nx, lx, ny};
}

/// The working resolution used by the acceptance suite and the CLI defaults.
inline Grid default_grid() { return make_grid(1024, 80.0, 32); }

}  // namespace kpi
