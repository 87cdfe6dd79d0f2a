#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "kpi/spectral.hpp"

namespace kpi {

inline const double sqrt3 = std::sqrt(3.0);
inline const double fourth_root3 = std::pow(3.0, 0.25);
/// Critical speed 4/√3 where the Zaitsev branch meets the line solitons.
inline const double critical_speed = 4.0 / std::sqrt(3.0);

// ---------------------------------------------------------------------------
// Speed of the Zaitsev family

inline double speed(double a) {
  if (!(a >= 0.0) || !(a < 1.0)) throw std::domain_error("speed: a must lie in [0, 1)");
  const double a2 = a * a;
  return (4.0 - 2.0 * a2 + a2 * a2) / (sqrt3 * (1.0 - a2));
}

/// c'(a) = (4a + 4a³ - 2a⁵) / (√3 (1 - a²)²).
inline double speed_derivative(double a) {
  if (!(a >= 0.0) || !(a < 1.0)) throw std::domain_error("speed_derivative: a must lie in [0, 1)");
  const double a2 = a * a;
  return (4.0 * a + 4.0 * a * a2 - 2.0 * a * a2 * a2) / (sqrt3 * (1.0 - a2) * (1.0 - a2));
}

inline double speed_second_derivative_at_zero() { return 4.0 / sqrt3; }

// ---------------------------------------------------------------------------
// Line soliton Q_c(x) = 3c sech²(√c x / 2)

inline double line_soliton_value(double c, double x) {
  const double s = 1.0 / std::cosh(0.5 * std::sqrt(c) * x);
  return 3.0 * c * s * s;
}

inline void check_line_soliton_box(double c, const Grid& g) {
  if (!(c > 0.0)) throw std::domain_error("line_soliton: speed must be positive");
  const double tail = line_soliton_value(c, 0.5 * g.lx);
  if (tail > 1e-12 * 3.0 * c) {
    throw std::domain_error("line_soliton: box too short for c = " + std::to_string(c) + " (edge value " +
                            std::to_string(tail) + ")");
  }
}

inline Profile1D line_soliton_profile(double c, const Grid& g) {
  check_line_soliton_box(c, g);
  return Profile1D::sample(g, [c](double x) { return line_soliton_value(c, x); });
}

inline Field line_soliton(double c, const Grid& g) { return extend_in_y(line_soliton_profile(c, g), g); }

// ---------------------------------------------------------------------------
// Zaitsev family

/// Parameters of the scaled/rotated/translated family Z(a⃗, γ)(x - ρ, y).
struct SolitonParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double gamma = 1.0;
  double rho = 0.0;

  double a_norm() const { return std::hypot(a1, a2); }
  /// Angle of a⃗; zero at the origin.
  double theta() const { return (a1 == 0.0 && a2 == 0.0) ? 0.0 : std::atan2(a2, a1); }
};

namespace detail {

struct ZaitsevSample {
  double value;
  double d_a1;
  double d_a2;
};

/// Closed form in Cartesian parameters. With B = √(2-|a|²)(a₁cos y - a₂sin y)
/// the rotated profile Z(|a|)(·, y+θ) reads 12(1-|a|²)(1 - B ch)/(√3 (ch - B)²),
/// which is smooth in (a₁, a₂) through the origin. Negative a₁ with a₂ = 0 is the
/// even extension Z(|a|)(x, y+π).
inline ZaitsevSample zaitsev_sample(double a1, double a2, double gamma, double x, double y, bool with_derivs) {
  const double s = a1 * a1 + a2 * a2;
  const double r2 = 1.0 - s;
  const double q = std::sqrt(2.0 - s);
  const double kappa = std::sqrt(r2) / fourth_root3;
  const double X = std::sqrt(gamma) * x;
  const double ch = std::cosh(kappa * X);
  const double cy = std::cos(y), sy = std::sin(y);
  const double L = a1 * cy - a2 * sy;
  const double B = q * L;
  const double N = 1.0 - B * ch;
  const double D = ch - B;
  const double pref = gamma * 12.0 / sqrt3;
  ZaitsevSample out{pref * r2 * N / (D * D), 0.0, 0.0};
  if (!with_derivs) return out;
  const double sh = std::sinh(kappa * X);
  auto partial = [&](double ai, double dL) {
    const double d_r2 = -2.0 * ai;
    const double d_q = -ai / q;
    const double d_B = d_q * L + q * dL;
    const double d_kappa = -ai / (std::sqrt(r2) * fourth_root3);
    const double d_ch = sh * X * d_kappa;
    const double d_N = -d_B * ch - B * d_ch;
    const double d_D = d_ch - d_B;
    return pref * (d_r2 * N / (D * D) + r2 * (d_N * D - 2.0 * N * d_D) / (D * D * D));
  };
  out.d_a1 = partial(a1, cy);
  out.d_a2 = partial(a2, -sy);
  return out;
}

inline void check_params(double a_norm, double gamma) {
  if (!(a_norm < 1.0)) throw std::domain_error("zaitsev: |a| must be < 1");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::domain_error("zaitsev: gamma must be positive");
}

/// x - rho wrapped into the box.
inline double wrap_x(const Grid& g, double x) {
  const double half = 0.5 * g.lx;
  double r = std::fmod(x + half, g.lx);
  if (r < 0) r += g.lx;
  return r - half;
}

}  // namespace detail

/// Z(a)(x, y) on the grid, 0 <= a < 1.
inline Field zaitsev(double a, const Grid& g) {
  if (!(a >= 0.0) || !(a < 1.0)) throw std::domain_error("zaitsev: a must lie in [0, 1)");
  return Field::sample(g, [a](double x, double y) { return detail::zaitsev_sample(a, 0.0, 1.0, x, y, false).value; });
}

/// Even extension in a: for a < 0 this is Z(|a|)(x, y + π).
inline Field zaitsev_even(double a, const Grid& g) {
  detail::check_params(std::abs(a), 1.0);
  return Field::sample(g, [a](double x, double y) { return detail::zaitsev_sample(a, 0.0, 1.0, x, y, false).value; });
}

/// γ Z(|a⃗|)(√γ (x - ρ), y + θ(a⃗)).
inline Field scaled_zaitsev(const SolitonParams& p, const Grid& g) {
  detail::check_params(p.a_norm(), p.gamma);
  return Field::sample(g, [&](double x, double y) {
    return detail::zaitsev_sample(p.a1, p.a2, p.gamma, detail::wrap_x(g, x - p.rho), y, false).value;
  });
}

/// ∂_{a₁} and ∂_{a₂} of scaled_zaitsev at fixed (γ, ρ), in closed form.
inline std::pair<Field, Field> zaitsev_a_derivatives(const SolitonParams& p, const Grid& g) {
  detail::check_params(p.a_norm(), p.gamma);
  Field d1(g), d2(g);
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    for (int i = 0; i < g.nx; ++i) {
      const auto z = detail::zaitsev_sample(p.a1, p.a2, p.gamma, detail::wrap_x(g, g.x(i) - p.rho), y, true);
      d1(i, j) = z.d_a1;
      d2(i, j) = z.d_a2;
    }
  }
  return {std::move(d1), std::move(d2)};
}

// ---------------------------------------------------------------------------
// Branch tangent v_* (∂_a Z(a)|_{a=0} = v_*(x) cos y)

inline double vstar_antideriv_value(double x) {
  const double s = x / fourth_root3;
  const double ch = std::cosh(s);
  return 12.0 * std::sqrt(2.0) * std::sinh(s) / (fourth_root3 * ch * ch);
}

/// Closed form of v_* itself: (12√2/√3)(2 sech³ - sech)(3^{-1/4} x).
inline double vstar_value(double x) {
  const double sech = 1.0 / std::cosh(x / fourth_root3);
  return 12.0 * std::sqrt(2.0) / sqrt3 * (2.0 * sech * sech * sech - sech);
}

inline Profile1D vstar_antideriv(const Grid& g) { return Profile1D::sample(g, vstar_antideriv_value); }

/// Spectral x-derivative of the closed-form antiderivative.
inline Profile1D vstar(const Grid& g) { return deriv_x(vstar_antideriv(g), 1); }

// ---------------------------------------------------------------------------
// Kernel generators g_μ(x) = e^{3^{-1/4}μx}(μ³ + 2μ - 3μ² tanh(3^{-1/4}x))

namespace detail {

inline void check_g_mu_range(double mu, const Grid& g) {
  if (!std::isfinite(mu)) throw std::domain_error("g_mu: mu must be finite");
  if (std::abs(mu) * 0.5 * g.lx / fourth_root3 > 700.0) {
    throw std::overflow_error("g_mu: exp(3^{-1/4} mu x) overflows on this box");
  }
}

}  // namespace detail

namespace detail {

/// 1 - tanh(z) without cancellation for large positive z.
inline double one_minus_tanh(double z) {
  if (z <= 0.0) return 1.0 - std::tanh(z);
  const double e = std::exp(-2.0 * z);
  return 2.0 * e / (1.0 + e);
}

}  // namespace detail

// μ³ + 2μ - 3μ² tanh is rewritten as (μ³ + 2μ - 3μ²) + 3μ²(1 - tanh): for μ = 1
// the first bracket vanishes and e^{μx}(1 - tanh) decays, which the naive form
// loses to cancellation on the right half of the box.

inline double g_mu_value(double mu, double x) {
  const double r = 1.0 / fourth_root3;
  const double A = mu * mu * mu + 2.0 * mu;
  const double B = 3.0 * mu * mu;
  return std::exp(r * mu * x) * ((A - B) + B * detail::one_minus_tanh(r * x));
}

/// d/dx g_μ in closed form.
inline double g_mu_dx_value(double mu, double x) {
  const double r = 1.0 / fourth_root3;
  const double A = mu * mu * mu + 2.0 * mu;
  const double B = 3.0 * mu * mu;
  const double sech = 1.0 / std::cosh(r * x);
  return std::exp(r * mu * x) * r * (mu * ((A - B) + B * detail::one_minus_tanh(r * x)) - B * sech * sech);
}

inline Profile1D g_mu(double mu, const Grid& g) {
  detail::check_g_mu_range(mu, g);
  return Profile1D::sample(g, [mu](double x) { return g_mu_value(mu, x); });
}

inline Profile1D g_mu_dx(double mu, const Grid& g) {
  detail::check_g_mu_range(mu, g);
  return Profile1D::sample(g, [mu](double x) { return g_mu_dx_value(mu, x); });
}

/// lim_{μ→1} ∂ₓ(g_μ + g_{-μ})/(μ - 1), by a central difference in μ
/// (g₁ + g₋₁ vanishes identically).
inline Profile1D g_mu_degenerate_dx(const Grid& g, double h = 1e-4) {
  detail::check_g_mu_range(1.0 + h, g);
  return Profile1D::sample(g, [h](double x) {
    auto G = [x](double mu) { return g_mu_dx_value(mu, x) + g_mu_dx_value(-mu, x); };
    return (G(1.0 + h) - G(1.0 - h)) / (2.0 * h);
  });
}

// ---------------------------------------------------------------------------
// Mass-matching scale γ_l(a) = (M(Z(l)) / M(Z(a)))^{2/3}

/// M(Z(a)) on the grid, with the even extension for a < 0.
inline double zaitsev_mass(double a, const Grid& g) {
  const Field z = zaitsev_even(a, g);
  return inner(z, z);
}

inline double gamma_l(double l, double a, const Grid& g) {
  if (!(l >= 0.0)) throw std::domain_error("gamma_l: l must be >= 0");
  return std::pow(zaitsev_mass(l, g) / zaitsev_mass(a, g), 2.0 / 3.0);
}

}  // namespace kpi
