#pragma once

#include <cmath>
#include <stdexcept>

#include "kpi/solitons.hpp"

namespace kpi {

inline double mass(const Field& f) { return inner(f, f); }

struct EnergyParts {
  double gradient = 0.0;  // ∫ u_x²
  double nonlocal = 0.0;  // ∫ (∂ₓ⁻¹ u_y)²
  double cubic = 0.0;     // -(1/3) ∫ u³
  double total() const { return gradient + nonlocal + cubic; }
};

namespace detail {

inline void require_uniform_x_mean(const Field& f, const char* who) {
  const auto m = x_means(f);
  double lo = m[0], hi = m[0];
  for (double v : m) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo > mean_zero_tolerance * std::max(max_abs(f), 1e-300)) {
    throw std::domain_error(std::string(who) + ": x-mean varies with y, ∂ₓ⁻¹∂_y u is undefined");
  }
}

}  // namespace detail

/// E(u) = ∫ u_x² + (∂ₓ⁻¹u_y)² - u³/3, with the cubic term dealiased by 3/2 padding.
inline EnergyParts energy_parts(const Field& u) {
  detail::require_uniform_x_mean(u, "energy");
  EnergyParts e;
  const Field ux = deriv_x(u, 1);
  e.gradient = inner(ux, ux);
  const Field w = antideriv_x_deriv_y(u);
  e.nonlocal = inner(w, w);
  e.cubic = -integral_of_cube(u) / 3.0;
  return e;
}

inline double energy(const Field& u) { return energy_parts(u).total(); }

struct FunctionalReport {
  double mass = 0.0;
  double energy = 0.0;
  double action = 0.0;
  double speed_used = 0.0;
  EnergyParts parts;
};

/// S_c(u) = E(u) + c M(u).
inline FunctionalReport action(const Field& u, double c) {
  FunctionalReport r;
  r.parts = energy_parts(u);
  r.mass = mass(u);
  r.energy = r.parts.total();
  r.speed_used = c;
  r.action = r.energy + c * r.mass;
  return r;
}

/// ∂ₓ⁻² g for x-localized g with zero x-mean on each line, normalized to vanish
/// at x → -∞ (the left box edge). The periodic mean-zero antiderivative differs
/// from it by the per-line constant (1/2lx) ∫ (lx/2 - s)² g(s) ds.
inline Field antideriv2_x_anchored(const Field& g) {
  Field out = antideriv_x(g, 2);
  const Grid& gr = g.grid;
  const double half = 0.5 * gr.lx;
  std::vector<double> weights(static_cast<std::size_t>(gr.nx));
  for (int i = 0; i < gr.nx; ++i) {
    const double d = half - gr.x(i);
    weights[i] = d * d;
  }
  std::vector<double> prod(static_cast<std::size_t>(gr.nx));
  for (int j = 0; j < gr.ny; ++j) {
    auto line = g.line(j);
    for (int i = 0; i < gr.nx; ++i) prod[i] = weights[i] * line[i];
    const double shift = stable_sum(prod) * gr.dx() / (2.0 * gr.lx);
    for (double& v : out.line(j)) v += shift;
  }
  return out;
}

/// -f_xx + ∂ₓ⁻² f_yy + c f - f²/2, with ∂ₓ⁻² decaying at the left edge.
inline Field stationary_residual(const Field& f, double c) {
  Field fyy = remove_x_mean(deriv_y(f, 2));
  Field r = antideriv2_x_anchored(fyy);
  r -= deriv_x(f, 2);
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    const double v = f.values[k];
    r.values[k] += c * v - 0.5 * v * v;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Orbit distance

struct OrbitDistance {
  double distance = 0.0;  // inf over shifts of ‖u - T(x0,y0) target‖_{Z¹}
  double x0 = 0.0;
  double y0 = 0.0;  // in [-π, π)
  double transverse_mean_part = 0.0;  // k_x = 0, k_y != 0 contribution (weight 1) to distance²
};

namespace detail {

/// Σ over the Hermitian spectrum of mult·w²·|U - T φ|²·area at shift (x0, y0).
inline std::pair<double, double> weighted_gap(const Spectrum2D& U, const Spectrum2D& T, double x0, double y0) {
  const Grid& g = U.grid;
  const auto fx = x_shift_factors(g, x0);
  const auto fy = y_shift_factors(g, y0);
  double total = 0.0, transverse = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int p = 0; p < g.nxh(); ++p) {
      const double mult = (p == 0 || p == g.nx / 2) ? 1.0 : 2.0;
      const double w = z1_weight(g, p, j);
      const double term = mult * w * w * std::norm(U(j, p) - T(j, p) * fx[p] * fy[j]) * g.area();
      total += term;
      if (p == 0 && j != 0) transverse += term;
    }
  }
  return {total, transverse};
}

}  // namespace detail

/// Minimizes the Z¹ distance from u to translates of target. All nx·ny grid
/// shifts are scored with one inverse FFT of the weighted cross-spectrum; the
/// best one is refined by Newton iteration on the continuous shift.
inline OrbitDistance orbit_distance(const Field& u, const Field& target) {
  u.check_same(target);
  const Grid& g = u.grid;
  const Spectrum2D U = forward(u);
  const Spectrum2D T = forward(target);

  // C = w² U conj(T): correlation R(m, n) = Σ C e^{i(ξ m dx + k n dy)} is the c2r transform.
  Spectrum2D C(g);
  for (int j = 0; j < g.ny; ++j)
    for (int p = 0; p < g.nxh(); ++p) {
      const double w = z1_weight(g, p, j);
      C(j, p) = w * w * U(j, p) * std::conj(T(j, p));
    }
  const Field R = inverse(C);
  std::size_t best = 0;
  for (std::size_t k = 1; k < R.values.size(); ++k)
    if (R.values[k] > R.values[best]) best = k;
  double x0 = static_cast<double>(best % g.nx) * g.dx();
  double y0 = static_cast<double>(best / g.nx) * g.dy();

  // Newton refinement of f(x0, y0) = Re Σ_half mult C e^{i(ξ x0 + k y0)}.
  for (int it = 0; it < 30; ++it) {
    double fx = 0, fy = 0, fxx = 0, fyy = 0, fxy = 0;
    for (int j = 0; j < g.ny; ++j) {
      if (j == g.ny / 2) continue;
      const double k = g.ky(j);
      for (int p = 0; p < g.nx / 2; ++p) {
        const double mult = p == 0 ? 1.0 : 2.0;
        const double xi = g.xi(p);
        const cplx z = mult * C(j, p) * std::polar(1.0, xi * x0 + k * y0);
        // d/dx0 Re(z) = Re(i ξ z) = -ξ Im z, etc.
        fx += -xi * z.imag();
        fy += -k * z.imag();
        fxx += -xi * xi * z.real();
        fyy += -k * k * z.real();
        fxy += -xi * k * z.real();
      }
    }
    double dx0 = 0.0, dy0 = 0.0;
    const double det = fxx * fyy - fxy * fxy;
    const double scale = std::abs(fxx) + std::abs(fyy) + 1e-300;
    if (fxx < 0 && fyy < 0 && det > 1e-12 * scale * scale) {
      dx0 = -(fyy * fx - fxy * fy) / det;
      dy0 = -(fxx * fy - fxy * fx) / det;
    } else {
      if (fxx < 0) dx0 = -fx / fxx;
      if (fyy < -1e-12 * scale) dy0 = -fy / fyy;
    }
    dx0 = std::clamp(dx0, -g.dx(), g.dx());
    dy0 = std::clamp(dy0, -g.dy(), g.dy());
    x0 += dx0;
    y0 += dy0;
    if (std::abs(dx0) < 1e-14 * g.lx && std::abs(dy0) < 1e-14) break;
  }
  x0 = detail::wrap_x(g, x0);
  y0 = std::remainder(y0, two_pi);
  if (y0 >= pi) y0 -= two_pi;

  const auto [gap, transverse] = detail::weighted_gap(U, T, x0, y0);
  return OrbitDistance{std::sqrt(std::max(gap, 0.0)), x0, y0, std::sqrt(std::max(transverse, 0.0))};
}

/// dist_l(u) = inf over translations of ‖u - Z(l)(· - x0, · - y0)‖_{Z¹}.
inline OrbitDistance dist_l(const Field& u, double l) { return orbit_distance(u, zaitsev(l, u.grid)); }

}  // namespace kpi
