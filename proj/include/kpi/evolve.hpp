#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kpi/modulation.hpp"

namespace kpi {

struct EvolutionConfig {
  double dt = 2e-3;
  double t_end = 10.0;
  bool dealias = true;
  int observer_stride = 50;
  bool observe_modulation = false;
  double blowup_factor = 100.0;
  /// Called with (observation index, t, u) at every observation, e.g. for snapshots.
  std::function<void(int, double, const Field&)> on_observe;
};

struct ModulationSummary {
  double t = 0.0;
  SolitonParams params;
  double eta_z1 = 0.0;
  int newton_iterations = 0;
};

struct TrajectoryReport {
  std::vector<double> times;
  std::vector<double> mass_series;
  std::vector<double> energy_series;
  std::vector<double> dist_series;
  std::vector<double> x0_series;  // unwrapped x-position of the best-matching translate
  std::vector<double> y0_series;
  std::vector<double> tail_mass_series;  // fraction of mass farther than 0.4·lx from the soliton
  std::vector<ModulationSummary> modulation_series;
  double max_dist = 0.0;
  double dt = 0.0;
  long steps = 0;
  double cfl = 0.0;  // dt · max|u₀| · ξ_max
  Field final_field;
};

class EvolutionError : public std::runtime_error {
 public:
  EvolutionError(const std::string& what, double t) : std::runtime_error(what), time(t) {}
  double time;
};

/// Pseudospectral KP-I solver u_t = -u_xxx - u u_x + ∂ₓ⁻¹u_yy with an
/// integrating factor for the linear part and classical RK4 for the rest.
///
/// The k_x = 0, k_y != 0 modes are zero throughout; the global x-mean (the
/// (0,0) mode) is carried along unchanged. With dealiasing on, the state is
/// kept inside the 2/3 band.
class KpSolver {
 public:
  explicit KpSolver(const Grid& g, bool dealias = true) : grid_(g), dealias_(dealias), symbol_(g), mask_(g) {
    for (int j = 0; j < g.ny; ++j) {
      const double k = g.ky(j);
      for (int p = 0; p < g.nxh(); ++p) {
        const double xi = g.xi(p);
        symbol_(j, p) = (p == 0 || p == g.nx / 2) ? cplx(0.0) : cplx(0.0, xi * xi * xi + k * k / xi);
        bool keep = !(p == 0 && j != 0);
        if (dealias_) keep = keep && p <= g.nx / 3 && std::abs(g.ky(j)) <= g.ny / 3 && j != g.ny / 2;
        mask_(j, p) = keep ? 1.0 : 0.0;
      }
    }
  }

  const Grid& grid() const { return grid_; }

  /// Largest retained x wavenumber.
  double xi_max() const { return grid_.xi(dealias_ ? grid_.nx / 3 : grid_.nx / 2 - 1); }

  Spectrum2D project(const Field& u) const {
    Spectrum2D s = forward(u);
    for (std::size_t k = 0; k < s.c.size(); ++k) s.c[k] *= mask_.c[k];
    return s;
  }

  /// -∂ₓ(u²/2), with the product truncated to the retained band.
  Spectrum2D nonlinear(const Spectrum2D& s) const {
    Field u = inverse(s);
    for (double& v : u.values) v = 0.5 * v * v;
    Spectrum2D n = forward(u);
    for (int j = 0; j < grid_.ny; ++j)
      for (int p = 0; p < grid_.nxh(); ++p) {
        const double xi = p == grid_.nx / 2 ? 0.0 : grid_.xi(p);
        n(j, p) *= cplx(0.0, -xi) * mask_(j, p).real();
      }
    return n;
  }

  /// Time derivative of u. Rejects fields whose x-mean depends on y.
  Field rhs(const Field& u) const {
    detail::require_uniform_x_mean(u, "rhs");
    Spectrum2D s = forward(u);
    for (int j = 0; j < grid_.ny; ++j)
      if (j != 0) s(j, 0) = 0.0;
    Spectrum2D n = nonlinear(s);
    for (std::size_t k = 0; k < s.c.size(); ++k) n.c[k] += symbol_.c[k] * s.c[k];
    return inverse(std::move(n));
  }

  /// One integrating-factor RK4 step on the coefficients (dt may be negative).
  void step(Spectrum2D& s, double dt) const {
    const std::size_t n = s.c.size();
    std::vector<cplx> e1(n), e2(n);
    for (std::size_t k = 0; k < n; ++k) {
      e1[k] = std::exp(symbol_.c[k] * (0.5 * dt));
      e2[k] = e1[k] * e1[k];
    }
    const Spectrum2D k1 = nonlinear(s);
    Spectrum2D tmp(grid_);
    for (std::size_t k = 0; k < n; ++k) tmp.c[k] = e1[k] * (s.c[k] + 0.5 * dt * k1.c[k]);
    const Spectrum2D k2 = nonlinear(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp.c[k] = e1[k] * s.c[k] + 0.5 * dt * k2.c[k];
    const Spectrum2D k3 = nonlinear(tmp);
    for (std::size_t k = 0; k < n; ++k) tmp.c[k] = e2[k] * s.c[k] + dt * e1[k] * k3.c[k];
    const Spectrum2D k4 = nonlinear(tmp);
    for (std::size_t k = 0; k < n; ++k) {
      s.c[k] = e2[k] * s.c[k] + (dt / 6.0) * (e2[k] * k1.c[k] + 2.0 * e1[k] * (k2.c[k] + k3.c[k]) + k4.c[k]);
    }
  }

 private:
  Grid grid_;
  bool dealias_;
  Spectrum2D symbol_;
  Spectrum2D mask_;
};

namespace detail {

inline void check_config(const EvolutionConfig& cfg) {
  if (!(cfg.dt != 0.0) || !std::isfinite(cfg.dt)) throw std::domain_error("evolve: dt must be nonzero and finite");
  if (!(cfg.t_end > 0.0)) throw std::domain_error("evolve: t_end must be positive");
  if (cfg.observer_stride < 1) throw std::domain_error("evolve: observer_stride must be >= 1");
}

/// Fraction of the mass at distance > 0.4·lx from x0 (periodic distance).
inline double tail_mass_fraction(const Field& u, double x0) {
  const Grid& g = u.grid;
  double outer = 0.0, total = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v = u(i, j) * u(i, j);
      total += v;
      if (std::abs(wrap_x(g, g.x(i) - x0)) > 0.4 * g.lx) outer += v;
    }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace detail

/// Evolves u0 for |t_end| time units with step cfg.dt (the sign of dt sets the
/// direction), observing M, E and dist to the Z(l) orbit every observer_stride steps.
inline TrajectoryReport run(const Field& u0, const EvolutionConfig& cfg, double l,
                            std::optional<SolitonParams> modulation_guess = {}) {
  detail::check_config(cfg);
  const Grid& g = u0.grid;
  detail::require_uniform_x_mean(u0, "evolve");
  const KpSolver solver(g, cfg.dealias);
  const long steps = std::max(1L, std::lround(cfg.t_end / std::abs(cfg.dt)));
  const double dt = std::copysign(cfg.t_end / static_cast<double>(steps), cfg.dt);
  const Field target = zaitsev(l, g);

  TrajectoryReport rep;
  rep.dt = dt;
  rep.steps = steps;
  Spectrum2D s = solver.project(u0);
  const double peak0 = max_abs(inverse(s));
  rep.cfl = std::abs(dt) * peak0 * solver.xi_max();
  std::optional<SolitonParams> guess = modulation_guess;

  double last_x0 = 0.0;
  auto observe = [&](long n) {
    const Field u = inverse(s);
    const double t = static_cast<double>(n) * dt;
    rep.times.push_back(t);
    rep.mass_series.push_back(spectral_energy(s));
    rep.energy_series.push_back(energy(u));
    const OrbitDistance d = orbit_distance(u, target);
    double x0 = d.x0;
    if (!rep.x0_series.empty()) x0 = last_x0 + detail::wrap_x(g, d.x0 - last_x0);
    last_x0 = x0;
    rep.x0_series.push_back(x0);
    rep.y0_series.push_back(d.y0);
    rep.dist_series.push_back(d.distance);
    rep.max_dist = std::max(rep.max_dist, d.distance);
    rep.tail_mass_series.push_back(detail::tail_mass_fraction(u, d.x0));
    if (cfg.on_observe) cfg.on_observe(static_cast<int>(rep.times.size()) - 1, t, u);
    if (cfg.observe_modulation) {
      const ModulationState st = decompose(u, guess);
      guess = st.params;
      rep.modulation_series.push_back({t, st.params, z1_norm_projected(st.eta).norm, st.newton_iterations});
    }
  };

  observe(0);
  for (long n = 1; n <= steps; ++n) {
    solver.step(s, dt);
    if (n % cfg.observer_stride == 0 || n == steps) {
      const Field u = inverse(s);
      if (!u.all_finite()) throw EvolutionError("evolve: non-finite values", static_cast<double>(n) * dt);
      const double peak = max_abs(u);
      if (peak > cfg.blowup_factor * peak0) {
        throw EvolutionError("evolve: blow-up, max|u| = " + std::to_string(peak), static_cast<double>(n) * dt);
      }
      observe(n);
    }
  }
  rep.final_field = inverse(s);
  return rep;
}

/// Least-squares slope of the tracked x-position against time.
inline double fitted_speed(const TrajectoryReport& r) {
  const std::size_t n = r.times.size();
  if (n < 2) throw std::domain_error("fitted_speed: need at least two observations");
  double mt = 0, mx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += r.times[i];
    mx += r.x0_series[i];
  }
  mt /= n;
  mx /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (r.times[i] - mt) * (r.x0_series[i] - mx);
    den += (r.times[i] - mt) * (r.times[i] - mt);
  }
  return num / den;
}

inline double relative_drift(const std::vector<double>& series) {
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - series.front()));
  return worst / std::abs(series.front());
}

// ---------------------------------------------------------------------------
// Stability experiment

/// Z(a) + δ·w with w seeded band-limited noise of unit Z¹ norm.
inline Field perturbed_soliton(double a, double delta, std::uint64_t seed, const Grid& g) {
  Field w = band_limited_noise(g, seed);
  w *= 1.0 / z1_norm(w);
  Field u = zaitsev(a, g);
  u.axpy(delta, w);
  return u;
}

struct StabilityRun {
  double delta = 0.0;
  double max_dist = 0.0;
  double ratio = 0.0;  // max_dist / δ
  double mass_drift = 0.0;
  double max_tail_mass = 0.0;
};

struct StabilityReport {
  double a = 0.0;
  double t_end = 0.0;
  std::uint64_t seed = 0;
  StabilityRun full;   // δ
  StabilityRun half;   // δ/2
  bool ratio_controlled = false;  // half.ratio ≤ 2 · full.ratio
};

inline StabilityRun stability_run(double a, double delta, std::uint64_t seed, const EvolutionConfig& cfg,
                                  const Grid& g) {
  const TrajectoryReport r = run(perturbed_soliton(a, delta, seed, g), cfg, a);
  StabilityRun out;
  out.delta = delta;
  out.max_dist = r.max_dist;
  out.ratio = delta > 0.0 ? r.max_dist / delta : 0.0;
  out.mass_drift = relative_drift(r.mass_series);
  for (double v : r.tail_mass_series) out.max_tail_mass = std::max(out.max_tail_mass, v);
  return out;
}

/// Runs δ and δ/2 from the same seed and compares max_dist/δ.
inline StabilityReport stability_experiment(double a, double delta, double t_end, std::uint64_t seed,
                                            EvolutionConfig cfg, const Grid& g) {
  if (!(a >= 0.0) || a > 0.3) throw std::domain_error("stability_experiment: a must lie in [0, 0.3]");
  if (!(delta >= 1e-4) || delta > 1e-2) throw std::domain_error("stability_experiment: delta must lie in [1e-4, 1e-2]");
  cfg.t_end = t_end;
  StabilityReport rep;
  rep.a = a;
  rep.t_end = t_end;
  rep.seed = seed;
  rep.full = stability_run(a, delta, seed, cfg, g);
  rep.half = stability_run(a, 0.5 * delta, seed, cfg, g);
  rep.ratio_controlled = rep.half.ratio <= 2.0 * rep.full.ratio;
  return rep;
}

}  // namespace kpi
