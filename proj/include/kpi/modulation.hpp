#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpi/functionals.hpp"

namespace kpi {

/// u(· + ρ, ·) = Z(a⃗, γ) + η with η orthogonal to Z, ∂ₓZ, ∂_{a₁}Z, ∂_{a₂}Z.
struct ModulationState {
  SolitonParams params;
  Field eta;
  std::array<double, 4> ortho_residuals{};
  int newton_iterations = 0;
  std::vector<double> residual_history;  // max |G| before each Newton step and at exit
  double tolerance = 0.0;
};

class ModulationError : public std::runtime_error {
 public:
  ModulationError(const std::string& what, std::array<double, 4> last) : std::runtime_error(what), last_residuals(last) {}
  std::array<double, 4> last_residuals;
};

/// The four directions Z, ∂ₓZ, ∂_{a₁}Z, ∂_{a₂}Z at (a⃗, γ), unshifted.
struct ModulationFrame {
  Field z;
  std::array<Field, 4> directions;
};

inline ModulationFrame modulation_frame(double gamma, double a1, double a2, const Grid& g) {
  const SolitonParams p{a1, a2, gamma, 0.0};
  ModulationFrame f;
  f.z = scaled_zaitsev(p, g);
  auto [d1, d2] = zaitsev_a_derivatives(p, g);
  f.directions = {f.z, deriv_x(f.z, 1), std::move(d1), std::move(d2)};
  return f;
}

namespace detail {

class ModulationProblem {
 public:
  explicit ModulationProblem(const Field& u) : grid_(u.grid), spectrum_(forward(u)) {}

  Field shifted(double rho) const { return inverse(translate(spectrum_, -rho, 0.0)); }

  std::array<double, 4> residual(const Eigen::Vector4d& x, Field* eta_out = nullptr) const {
    const ModulationFrame f = modulation_frame(x(0), x(2), x(3), grid_);
    Field eta = shifted(x(1));
    eta -= f.z;
    std::array<double, 4> r{};
    for (int k = 0; k < 4; ++k) r[k] = inner(eta, f.directions[k]);
    if (eta_out) *eta_out = std::move(eta);
    return r;
  }

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  Spectrum2D spectrum_;
};

inline double max_abs4(const std::array<double, 4>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m;
}

inline bool admissible(const Eigen::Vector4d& x) { return x(0) > 0.0 && std::hypot(x(2), x(3)) < 0.95; }

}  // namespace detail

/// G(u, γ, ρ, a⃗): inner products of u(· + ρ) - Z(a⃗, γ) with the four directions.
inline std::array<double, 4> residual_G(const Field& u, const SolitonParams& p) {
  detail::check_params(p.a_norm(), p.gamma);
  return detail::ModulationProblem(u).residual(Eigen::Vector4d(p.gamma, p.rho, p.a1, p.a2));
}

/// Starting point from the x-correlation with Q (ρ), projections on v_* cos y and
/// v_* sin y (a⃗), and the mass ratio (γ).
inline SolitonParams modulation_initial_guess(const Field& u) {
  const Grid& g = u.grid;
  SolitonParams p;
  const OrbitDistance d = orbit_distance(remove_transverse_x_mean(u), line_soliton(critical_speed, g));
  p.rho = d.x0;
  const Field centered = translate(u, -p.rho, 0.0);
  const Profile1D v = vstar(g);
  const double norm = pi * inner(v, v);
  p.a1 = inner(centered, times_cos_y(v, g)) / norm;
  p.a2 = -inner(centered, times_sin_y(v, g)) / norm;
  const double an = p.a_norm();
  if (an > 0.9) {
    p.a1 *= 0.9 / an;
    p.a2 *= 0.9 / an;
  }
  p.gamma = std::pow(mass(u) / zaitsev_mass(p.a_norm(), g), 2.0 / 3.0);
  return p;
}

/// Newton iteration on G = 0 in the Cartesian chart (γ, ρ, a₁, a₂), with a
/// central-difference Jacobian and residual backtracking.
inline ModulationState decompose(const Field& u, std::optional<SolitonParams> guess = {}, int max_iterations = 50) {
  const detail::ModulationProblem prob(u);
  const SolitonParams start = guess ? *guess : modulation_initial_guess(u);
  detail::check_params(start.a_norm(), start.gamma);
  Eigen::Vector4d x(start.gamma, start.rho, start.a1, start.a2);

  ModulationState st;
  st.tolerance = 1e-10 * l2_norm(scaled_zaitsev({start.a1, start.a2, start.gamma, 0.0}, u.grid));
  auto r = prob.residual(x);
  double rn = detail::max_abs4(r);
  const double h = 1e-5;
  int it = 0;
  for (; it < max_iterations; ++it) {
    st.residual_history.push_back(rn);
    if (rn < st.tolerance) break;
    Eigen::Matrix4d J;
    for (int k = 0; k < 4; ++k) {
      Eigen::Vector4d xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      const auto rp = prob.residual(xp);
      const auto rm = prob.residual(xm);
      for (int i = 0; i < 4; ++i) J(i, k) = (rp[i] - rm[i]) / (2.0 * h);
    }
    const Eigen::Vector4d rv(r[0], r[1], r[2], r[3]);
    const Eigen::Vector4d step = -J.colPivHouseholderQr().solve(rv);
    if (!step.allFinite()) throw ModulationError("decompose: singular Jacobian", r);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, t *= 0.5) {
      const Eigen::Vector4d trial = x + t * step;
      if (!detail::admissible(trial)) continue;
      const auto rt = prob.residual(trial);
      if (detail::max_abs4(rt) < rn) {
        x = trial;
        r = rt;
        rn = detail::max_abs4(rt);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // At the roundoff floor no step can reduce |G|; accept if already tiny.
      if (rn < 1e3 * st.tolerance) break;
      throw ModulationError("decompose: line search failed at |G| = " + std::to_string(rn), r);
    }
  }
  if (it == max_iterations && rn >= st.tolerance) {
    throw ModulationError("decompose: no convergence in " + std::to_string(max_iterations) + " iterations", r);
  }
  if (st.residual_history.empty() || st.residual_history.back() != rn) st.residual_history.push_back(rn);
  st.newton_iterations = it;
  st.params = {x(2), x(3), x(0), x(1)};
  st.ortho_residuals = prob.residual(x, &st.eta);
  st.params.rho = detail::wrap_x(u.grid, st.params.rho);
  return st;
}

// ---------------------------------------------------------------------------
// Sample families

/// Seeded band-limited noise (|ξ| ≤ xi_max, |k| ≤ k_max) under a Gaussian
/// envelope of width sigma, with zero x-mean on every y-line.
inline Field band_limited_noise(const Grid& g, std::uint64_t seed, double xi_max = 2.0, int k_max = 3,
                                double sigma = 4.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum2D s(g);
  const int pmax = std::min(g.nx / 2 - 1, static_cast<int>(xi_max * g.lx / two_pi));
  for (int j = 0; j < g.ny; ++j) {
    const int k = g.ky(j);
    if (std::abs(k) > k_max || j == g.ny / 2) continue;
    for (int p = 0; p <= pmax; ++p) {
      if (p == 0 && k < 0) continue;  // Hermitian partner of k > 0
      s(j, p) = cplx(normal(rng), p == 0 && k == 0 ? 0.0 : normal(rng));
    }
  }
  for (int k = 1; k <= k_max; ++k) s(g.ny - k, 0) = std::conj(s(k, 0));
  Field w = inverse(std::move(s));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i);
      w(i, j) *= std::exp(-x * x / (2.0 * sigma * sigma));
    }
  return remove_x_mean(w);
}

/// Removes the L² components of w along the four modulation directions of the frame.
inline Field orthogonalize(const Field& w, const ModulationFrame& f) {
  Eigen::Matrix4d gram;
  Eigen::Vector4d rhs;
  for (int i = 0; i < 4; ++i) {
    rhs(i) = inner(f.directions[i], w);
    for (int j = 0; j < 4; ++j) gram(i, j) = inner(f.directions[i], f.directions[j]);
  }
  const Eigen::Vector4d coef = gram.ldlt().solve(rhs);
  Field out = w;
  for (int i = 0; i < 4; ++i) out.axpy(-coef(i), f.directions[i]);
  return out;
}

struct PerturbedSample {
  Field u;
  SolitonParams base;  // the soliton the perturbation was built around
  double delta = 0.0;
};

/// Equal-mass sample near the l-branch: Z(a⃗, γ_l(|a⃗|)) + δ w, w orthogonal to the
/// four directions with unit Z¹ norm, then rescaled to mass M(Z(l)).
/// l = 0 draws |a⃗| = δ^{1/3}·U(0,1); l > 0 draws |a⃗| = l + δ·U(-1,1); angles uniform.
inline PerturbedSample perturbed_sample(double l, double delta, std::uint64_t seed, const Grid& g) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = l == 0.0 ? std::cbrt(delta) * unit(rng) : l + delta * (2.0 * unit(rng) - 1.0);
  const double theta = two_pi * unit(rng);
  const double ml = zaitsev_mass(l, g);
  PerturbedSample s;
  s.delta = delta;
  s.base = {r * std::cos(theta), r * std::sin(theta), std::pow(ml / zaitsev_mass(r, g), 2.0 / 3.0), 0.0};
  const ModulationFrame f = modulation_frame(s.base.gamma, s.base.a1, s.base.a2, g);
  Field w = orthogonalize(band_limited_noise(g, seed), f);
  w *= 1.0 / z1_norm(w);
  s.u = f.z;
  s.u.axpy(delta, w);
  s.u *= std::sqrt(ml / mass(s.u));
  return s;
}

// ---------------------------------------------------------------------------
// Inequality checks

struct GapCheck {
  double gap = 0.0;              // ‖Z(a⃗, γ_l(|a⃗|)) - Z(a⃗, γ)‖_{Z¹}
  double eta_mass = 0.0;         // ‖η‖²_{L²}
  double ratio = 0.0;            // gap / ‖η‖²_{L²}
  double gamma_excess = 0.0;     // γ_l(|a⃗|) - γ
  ModulationState state;
};

inline constexpr double equal_mass_tolerance = 1e-10;

inline void require_equal_mass(const Field& u, double l) {
  const double ml = zaitsev_mass(l, u.grid);
  if (std::abs(mass(u) - ml) > equal_mass_tolerance * ml) {
    throw std::domain_error("mass(u) differs from M(Z(l)); rescale u first");
  }
}

inline GapCheck lemma6_gap_check(const Field& u, double l, std::optional<SolitonParams> guess = {}) {
  require_equal_mass(u, l);
  const Grid& g = u.grid;
  GapCheck c;
  c.state = decompose(u, guess);
  const SolitonParams& p = c.state.params;
  const double gl = std::pow(zaitsev_mass(l, g) / zaitsev_mass(p.a_norm(), g), 2.0 / 3.0);
  c.gamma_excess = gl - p.gamma;
  c.gap = z1_norm_projected(scaled_zaitsev({p.a1, p.a2, gl, 0.0}, g) - scaled_zaitsev({p.a1, p.a2, p.gamma, 0.0}, g)).norm;
  c.eta_mass = mass(c.state.eta);
  c.ratio = c.eta_mass > 0.0 ? c.gap / c.eta_mass : 0.0;
  return c;
}

struct LyapunovCheck {
  double lhs = 0.0;        // S_{c(l)}(u) - S_{c(l)}(Z(l))
  double a_term = 0.0;     // |a|⁶ for l = 0, (|a| - l)² otherwise
  double eta_z1_sq = 0.0;  // ‖η‖²_{Z¹}
  double k = 0.0;          // lhs / (a_term + eta_z1_sq)
  ModulationState state;
};

inline LyapunovCheck lyapunov_inequality_check(const Field& u, double l, std::optional<SolitonParams> guess = {}) {
  if (!(l >= 0.0)) throw std::domain_error("lyapunov_inequality_check: l must be >= 0");
  require_equal_mass(u, l);
  const Grid& g = u.grid;
  const double c = speed(l);
  LyapunovCheck out;
  out.lhs = action(u, c).action - action(zaitsev(l, g), c).action;
  out.state = decompose(u, guess);
  const double an = out.state.params.a_norm();
  out.a_term = l == 0.0 ? std::pow(an, 6) : (an - l) * (an - l);
  const double ez = z1_norm_projected(out.state.eta).norm;
  out.eta_z1_sq = ez * ez;
  const double rhs = out.a_term + out.eta_z1_sq;
  out.k = rhs > 0.0 ? out.lhs / rhs : 0.0;
  return out;
}

/// (‖η‖_{Z¹} + |γ - 1| + |a⃗|) / dist₀(u), the empirical K₁.
inline double modulation_bound_ratio(const Field& u, const ModulationState& st) {
  const double d0 = dist_l(remove_transverse_x_mean(u), 0.0).distance;
  const double lhs = z1_norm_projected(st.eta).norm + std::abs(st.params.gamma - 1.0) + st.params.a_norm();
  return d0 > 0.0 ? lhs / d0 : 0.0;
}

}  // namespace kpi
