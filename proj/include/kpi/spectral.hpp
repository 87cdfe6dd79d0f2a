#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "kpi/fft.hpp"

namespace kpi {

/// Compensated (Neumaier) sum.
inline double stable_sum(std::span<const double> v) {
  double s = 0.0, comp = 0.0;
  for (double x : v) {
    const double t = s + x;
    comp += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + comp;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Periodic trapezoid over the whole box.
inline double integrate(const Field& f) { return stable_sum(f.values) * f.grid.dx() * f.grid.dy(); }

inline double integrate_x(const Profile1D& p) { return stable_sum(p.values) * p.grid.dx(); }

inline double inner(const Field& a, const Field& b) {
  a.check_same(b);
  std::vector<double> prod(a.values.size());
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = a.values[k] * b.values[k];
  return stable_sum(prod) * a.grid.dx() * a.grid.dy();
}

inline double inner(const Profile1D& a, const Profile1D& b) {
  std::vector<double> prod(a.values.size());
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = a.values[k] * b.values[k];
  return stable_sum(prod) * a.grid.dx();
}

inline double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }
inline double l2_norm(const Profile1D& f) { return std::sqrt(inner(f, f)); }

/// Σ|c|² over the full Hermitian spectrum times the box area (Parseval: equals ∫f²).
inline double spectral_energy(const Spectrum2D& s) {
  const Grid& g = s.grid;
  double total = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int p = 0; p < g.nxh(); ++p) {
      const double mult = (p == 0 || p == g.nx / 2) ? 1.0 : 2.0;
      total += mult * std::norm(s(j, p));
    }
  }
  return total * g.area();
}

// ---------------------------------------------------------------------------
// x-mean handling

/// Mean over x of each y-line.
inline std::vector<double> x_means(const Field& f) {
  std::vector<double> m(static_cast<std::size_t>(f.grid.ny));
  for (int j = 0; j < f.grid.ny; ++j) m[j] = stable_sum(f.line(j)) / f.grid.nx;
  return m;
}

inline double x_mean(const Profile1D& p) { return stable_sum(p.values) / p.grid.nx; }

/// Relative tolerance on the x-mean for operations that need ∂ₓ⁻¹.
inline constexpr double mean_zero_tolerance = 1e-10;

inline void require_x_mean_zero(const Field& f, const char* who) {
  const double scale = std::max(max_abs(f), 1e-300);
  for (double m : x_means(f)) {
    if (std::abs(m) > mean_zero_tolerance * scale) {
      throw std::domain_error(std::string(who) + ": field has nonzero x-mean (" + std::to_string(m) +
                              "); project it first");
    }
  }
}

inline void require_x_mean_zero(const Profile1D& f, const char* who) {
  const double scale = std::max(max_abs(f), 1e-300);
  if (std::abs(x_mean(f)) > mean_zero_tolerance * scale) {
    throw std::domain_error(std::string(who) + ": profile has nonzero x-mean (" + std::to_string(x_mean(f)) + ")");
  }
}

/// Zeroes every k_x = 0 coefficient (each y-line gets zero x-mean).
inline Field remove_x_mean(const Field& f) {
  Field out = f;
  const auto m = x_means(f);
  for (int j = 0; j < f.grid.ny; ++j)
    for (double& v : out.line(j)) v -= m[j];
  return out;
}

/// Zeroes the k_x = 0 coefficients with k_y != 0 and keeps the global mean,
/// so the x-mean becomes the same on every y-line.
inline Field remove_transverse_x_mean(const Field& f) {
  Field out = f;
  const auto m = x_means(f);
  double avg = 0.0;
  for (double v : m) avg += v;
  avg /= f.grid.ny;
  for (int j = 0; j < f.grid.ny; ++j)
    for (double& v : out.line(j)) v -= m[j] - avg;
  return out;
}

inline Profile1D remove_x_mean(const Profile1D& f) {
  Profile1D out = f;
  const double m = x_mean(f);
  for (double& v : out.values) v -= m;
  return out;
}

// ---------------------------------------------------------------------------
// Multipliers

/// Multiplies every coefficient by mult(xi, ky, p, j).
template <class M>
void apply_multiplier(Spectrum2D& s, M&& mult) {
  const Grid& g = s.grid;
  for (int j = 0; j < g.ny; ++j) {
    const int k = g.ky(j);
    for (int p = 0; p < g.nxh(); ++p) s(j, p) *= mult(g.xi(p), k, p, j);
  }
}

template <class M>
void apply_multiplier(Spectrum1D& s, M&& mult) {
  const Grid& g = s.grid;
  for (int p = 0; p < g.nxh(); ++p) s.c[p] *= mult(g.xi(p), p);
}

namespace detail {

inline cplx ipow(double k, int order) {
  // (i k)^order
  static const cplx ipows[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return ipows[((order % 4) + 4) % 4] * std::pow(k, order);
}

inline cplx x_derivative_symbol(const Grid& g, int p, int order) {
  if (order % 2 != 0 && p == g.nx / 2) return 0.0;
  return ipow(g.xi(p), order);
}

inline cplx x_antiderivative_symbol(const Grid& g, int p, int order) {
  if (p == 0) return 0.0;
  if (order % 2 != 0 && p == g.nx / 2) return 0.0;
  return 1.0 / ipow(g.xi(p), order);
}

}  // namespace detail

/// Spectral ∂ₓ^order. The Nyquist mode is dropped for odd orders.
inline Field deriv_x(const Field& f, int order = 1) {
  if (order < 1) throw std::invalid_argument("deriv_x: order must be >= 1");
  Spectrum2D s = forward(f);
  const Grid& g = f.grid;
  apply_multiplier(s, [&](double, int, int p, int) { return detail::x_derivative_symbol(g, p, order); });
  return inverse(std::move(s));
}

inline Profile1D deriv_x(const Profile1D& f, int order = 1) {
  if (order < 1) throw std::invalid_argument("deriv_x: order must be >= 1");
  Spectrum1D s = forward(f);
  const Grid& g = f.grid;
  apply_multiplier(s, [&](double, int p) { return detail::x_derivative_symbol(g, p, order); });
  return inverse(std::move(s));
}

/// Spectral ∂_y^order. The Nyquist row is dropped for odd orders.
inline Field deriv_y(const Field& f, int order = 1) {
  if (order < 1) throw std::invalid_argument("deriv_y: order must be >= 1");
  Spectrum2D s = forward(f);
  const Grid& g = f.grid;
  apply_multiplier(s, [&](double, int k, int, int j) -> cplx {
    if (order % 2 != 0 && j == g.ny / 2) return 0.0;
    return detail::ipow(k, order);
  });
  return inverse(std::move(s));
}

/// Mean-zero periodic ∂ₓ^{-order}. Rejects input whose x-mean is not zero.
inline Field antideriv_x(const Field& f, int order = 1) {
  if (order < 1) throw std::invalid_argument("antideriv_x: order must be >= 1");
  require_x_mean_zero(f, "antideriv_x");
  Spectrum2D s = forward(f);
  const Grid& g = f.grid;
  apply_multiplier(s, [&](double, int, int p, int) { return detail::x_antiderivative_symbol(g, p, order); });
  return inverse(std::move(s));
}

inline Profile1D antideriv_x(const Profile1D& f, int order = 1) {
  if (order < 1) throw std::invalid_argument("antideriv_x: order must be >= 1");
  require_x_mean_zero(f, "antideriv_x");
  Spectrum1D s = forward(f);
  const Grid& g = f.grid;
  apply_multiplier(s, [&](double, int p) { return detail::x_antiderivative_symbol(g, p, order); });
  return inverse(std::move(s));
}

/// ∂ₓ⁻¹∂_y f, the integrand of the nonlocal energy term. Only k_x != 0 modes
/// contribute, so no mean precondition is needed beyond the zero-mode policy.
inline Field antideriv_x_deriv_y(const Field& f) {
  Spectrum2D s = forward(f);
  const Grid& g = f.grid;
  apply_multiplier(s, [&](double xi, int k, int p, int j) -> cplx {
    if (p == 0 || p == g.nx / 2 || j == g.ny / 2) return 0.0;
    return cplx(k / xi, 0.0);
  });
  return inverse(std::move(s));
}

// ---------------------------------------------------------------------------
// Translation

namespace detail {

/// Per-axis phase factors for a shift by x0 (resp. y0). Nyquist entries use the
/// real cosine factor so the shifted field stays real; grid-aligned shifts are
/// exact rotations either way.
inline std::vector<cplx> x_shift_factors(const Grid& g, double x0) {
  std::vector<cplx> fx(static_cast<std::size_t>(g.nxh()));
  for (int p = 0; p < g.nxh(); ++p) {
    const double ph = g.xi(p) * x0;
    fx[p] = (p == g.nx / 2) ? cplx(std::cos(ph), 0.0) : std::polar(1.0, -ph);
  }
  return fx;
}

inline std::vector<cplx> y_shift_factors(const Grid& g, double y0) {
  std::vector<cplx> fy(static_cast<std::size_t>(g.ny));
  for (int j = 0; j < g.ny; ++j) {
    const double ph = g.ky(j) * y0;
    fy[j] = (j == g.ny / 2) ? cplx(std::cos(ph), 0.0) : std::polar(1.0, -ph);
  }
  return fy;
}

}  // namespace detail

/// Returns the coefficients of f(x - x0, y - y0).
inline Spectrum2D translate(Spectrum2D s, double x0, double y0) {
  const auto fx = detail::x_shift_factors(s.grid, x0);
  const auto fy = detail::y_shift_factors(s.grid, y0);
  for (int j = 0; j < s.grid.ny; ++j)
    for (int p = 0; p < s.grid.nxh(); ++p) s(j, p) *= fx[p] * fy[j];
  return s;
}

/// f(x - x0, y - y0), spectrally.
inline Field translate(const Field& f, double x0, double y0 = 0.0) {
  return inverse(translate(forward(f), x0, y0));
}

inline Profile1D translate(const Profile1D& f, double x0) {
  Spectrum1D s = forward(f);
  const auto fx = detail::x_shift_factors(f.grid, x0);
  for (int p = 0; p < f.grid.nxh(); ++p) s.c[p] *= fx[p];
  return inverse(std::move(s));
}

// ---------------------------------------------------------------------------
// Z¹ norm

/// Weight 1 + |ξ| + |k/ξ|; the k_x = 0 column carries weight 1.
inline double z1_weight(const Grid& g, int p, int j) {
  if (p == 0) return 1.0;
  const double xi = g.xi(p);
  return 1.0 + xi + std::abs(static_cast<double>(g.ky(j))) / xi;
}

struct Z1Parts {
  double mean_zero_sq = 0.0;   // k_x != 0 modes plus the (0,0) mode
  double transverse_mean_sq = 0.0;  // k_x = 0, k_y != 0 modes (weight 1)
};

inline Z1Parts z1_parts(const Spectrum2D& s) {
  const Grid& g = s.grid;
  Z1Parts parts;
  for (int j = 0; j < g.ny; ++j) {
    for (int p = 0; p < g.nxh(); ++p) {
      const double mult = (p == 0 || p == g.nx / 2) ? 1.0 : 2.0;
      const double w = z1_weight(g, p, j);
      const double term = mult * w * w * std::norm(s(j, p)) * g.area();
      if (p == 0 && j != 0) {
        parts.transverse_mean_sq += term;
      } else {
        parts.mean_zero_sq += term;
      }
    }
  }
  return parts;
}

/// Discrete Z¹ norm with continuum (Plancherel) scaling. The x-mean of every
/// y-line must agree (k_x = 0, k_y != 0 coefficients vanish); the common x-mean
/// is counted with weight 1.
inline double z1_norm(const Field& f) {
  const Field centered = remove_transverse_x_mean(f);
  Field diff = f;
  diff -= centered;
  const double scale = std::max(max_abs(f), 1e-300);
  if (max_abs(diff) > mean_zero_tolerance * scale) {
    throw std::domain_error("z1_norm: x-mean varies with y; the Z1 norm is undefined");
  }
  return std::sqrt(z1_parts(forward(centered)).mean_zero_sq);
}

/// Z¹ norm after zeroing the k_x = 0, k_y != 0 coefficients; the dropped part
/// (weight 1) is returned alongside. Meant for differences of fields whose
/// per-line x-means agree only to quadrature accuracy.
struct ProjectedZ1 {
  double norm = 0.0;
  double dropped = 0.0;
};

inline ProjectedZ1 z1_norm_projected(const Field& f) {
  const Z1Parts parts = z1_parts(forward(f));
  return {std::sqrt(parts.mean_zero_sq), std::sqrt(parts.transverse_mean_sq)};
}

// ---------------------------------------------------------------------------
// Dealiasing and padding

/// Smallest m >= n that is even and factors into 2, 3, 5, 7.
inline int next_fast_size(int n) {
  int m = n + (n % 2);
  while (!detail::small_prime_factors(m)) m += 2;
  return m;
}

/// Zeroes modes outside the 2/3 band: |p| > nx/3 or |k| > ny/3.
inline void dealias_two_thirds(Spectrum2D& s) {
  const Grid& g = s.grid;
  const int pmax = g.nx / 3;
  const int kmax = g.ny / 3;
  for (int j = 0; j < g.ny; ++j) {
    const bool ky_out = std::abs(g.ky(j)) > kmax || j == g.ny / 2;
    for (int p = 0; p < g.nxh(); ++p) {
      if (ky_out || p > pmax) s(j, p) = 0.0;
    }
  }
}

/// Band-limited interpolation of the coefficients onto a finer grid with the same box.
inline Spectrum2D zero_pad(const Spectrum2D& s, const Grid& fine) {
  const Grid& g = s.grid;
  if (fine.nx < g.nx || fine.ny < g.ny || fine.lx != g.lx) throw std::invalid_argument("zero_pad: bad target grid");
  Spectrum2D out(fine);
  for (int j = 0; j < g.ny; ++j) {
    const int k = g.ky(j);
    for (int p = 0; p < g.nxh(); ++p) {
      cplx v = s(j, p);
      if (p == g.nx / 2 && fine.nx > g.nx) v *= 0.5;
      if (j == g.ny / 2 && fine.ny > g.ny) {
        v *= 0.5;
        out(fine.ny - k, p) += v;  // the -ny/2 partner
      }
      const int jj = k >= 0 ? k : fine.ny + k;
      out(jj, p) += v;
    }
  }
  return out;
}

/// ∫u³ evaluated on a 3/2-padded grid, exact for band-limited u.
inline double integral_of_cube(const Field& u) {
  const Grid& g = u.grid;
  const Grid fine{next_fast_size((3 * g.nx + 1) / 2), g.lx, next_fast_size((3 * g.ny + 1) / 2)};
  Field up = inverse(zero_pad(forward(u), fine));
  for (double& v : up.values) v = v * v * v;
  return integrate(up);
}

}  // namespace kpi
