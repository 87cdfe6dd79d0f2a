#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "kpi/functionals.hpp"

namespace kpi {

// ---------------------------------------------------------------------------
// Exact sech moments

struct Rational {
  long long num = 0;
  long long den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

inline Rational make_rational(long long num, long long den) {
  if (den == 0) throw std::domain_error("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

inline Rational operator+(Rational a, Rational b) { return make_rational(a.num * b.den + b.num * a.den, a.den * b.den); }
inline Rational operator*(Rational a, Rational b) { return make_rational(a.num * b.num, a.den * b.den); }
inline Rational operator*(long long s, Rational a) { return make_rational(s * a.num, a.den); }

/// ∫ sech^{2k} over ℝ via 2k ∫sech^{2k} = (2k+1) ∫sech^{2k+2}, starting from ∫sech² = 2.
inline Rational sech_moment_exact(int k) {
  if (k < 1) throw std::domain_error("sech_moment: k must be >= 1");
  Rational m{2, 1};
  for (int j = 1; j < k; ++j) m = m * make_rational(2 * j, 2 * j + 1);
  return m;
}

inline double sech_moment(int k) { return sech_moment_exact(k).value(); }

/// Trapezoid quadrature of sech^{2k} on [-40, 40) with 4096 nodes (spectrally accurate).
inline double sech_moment_quadrature(int k) {
  if (k < 1) throw std::domain_error("sech_moment: k must be >= 1");
  const Grid g = make_grid(4096, 80.0, 8);
  std::vector<double> v(static_cast<std::size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i) v[i] = std::pow(1.0 / std::cosh(g.x(i)), 2 * k);
  return stable_sum(v) * g.dx();
}

// ---------------------------------------------------------------------------
// Derivatives of a ↦ M(Z(a)) at a = 0

struct DerivativeEstimate {
  int order = 0;
  double value = 0.0;
  double step = 0.0;
  int stencil_order = 0;  // accuracy order in h after extrapolation
  double richardson_error = 0.0;
  std::vector<double> levels;  // raw central estimates at h, h/2, h/4
};

namespace detail {

/// Central stencils with O(h²) error on the nodes -2h..2h.
inline const std::array<double, 5>& central_weights(int order) {
  static const std::array<std::array<double, 5>, 4> w = {{
      {0.0, -0.5, 0.0, 0.5, 0.0},
      {0.0, 1.0, -2.0, 1.0, 0.0},
      {-0.5, 1.0, 0.0, -1.0, 0.5},
      {1.0, -4.0, 6.0, -4.0, 1.0},
  }};
  return w[order - 1];
}

/// Richardson table on h, h/2, h/4 for an even-in-h error expansion.
template <class F>
DerivativeEstimate richardson_central(F&& f, int order, double step, double scale) {
  DerivativeEstimate est;
  est.order = order;
  est.step = step;
  est.stencil_order = 6;
  const auto& w = central_weights(order);
  double weight_sum = 0.0;
  for (double c : w) weight_sum += std::abs(c);
  for (int level = 0; level < 3; ++level) {
    const double h = step / std::pow(2.0, level);
    double acc = 0.0;
    for (int m = -2; m <= 2; ++m) {
      if (w[m + 2] != 0.0) acc += w[m + 2] * f(m * h);
    }
    est.levels.push_back(acc / std::pow(h, order));
  }
  const auto& L = est.levels;
  const double r1a = (4.0 * L[1] - L[0]) / 3.0;
  const double r1b = (4.0 * L[2] - L[1]) / 3.0;
  est.value = (16.0 * r1b - r1a) / 15.0;
  est.richardson_error = std::abs(est.value - r1b);

  const double h_min = step / 4.0;
  const double roundoff = 1e-14 * scale * weight_sum / std::pow(h_min, order);
  if (roundoff > 1e-2 * std::max(std::abs(est.value), 1.0)) {
    throw std::domain_error("mass_derivative_at_zero: step too small, cancellation dominates");
  }
  return est;
}

}  // namespace detail

/// Memoized M(Z(a)) on one grid; negative a uses the even extension.
class MassCurve {
 public:
  explicit MassCurve(const Grid& g) : grid_(g) {}

  double operator()(double a) {
    if (auto it = cache_.find(a); it != cache_.end()) return it->second;
    const double m = zaitsev_mass(a, grid_);
    cache_.emplace(a, m);
    return m;
  }

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  std::map<double, double> cache_;
};

/// ∂ₐⁿ M(Z(a)) at a = 0 for n = 1..4, from central stencils on the even
/// extension with two Richardson levels.
inline DerivativeEstimate mass_derivative_at_zero(int order, double step, MassCurve& curve) {
  if (order < 1 || order > 4) throw std::domain_error("mass_derivative_at_zero: order must be in 1..4");
  if (!(step > 0.0) || 2.0 * step > 0.5) throw std::domain_error("mass_derivative_at_zero: samples leave [-0.5, 0.5]");
  const double m0 = curve(0.0);
  return detail::richardson_central([&](double a) { return curve(a); }, order, step, m0);
}

inline DerivativeEstimate mass_derivative_at_zero(int order, double step = 0.05, const Grid& g = default_grid()) {
  MassCurve curve(g);
  return mass_derivative_at_zero(order, step, curve);
}

/// ∂ₐ M(Z(a)) at a = l > 0 by a Richardson-extrapolated central difference.
inline DerivativeEstimate mass_derivative_at(double l, double step, MassCurve& curve) {
  if (!(l - 2.0 * step >= -0.5) || !(l + 2.0 * step < 1.0)) throw std::domain_error("mass_derivative_at: bad step");
  const double m0 = curve(l);
  return detail::richardson_central([&](double h) { return curve(l + h); }, 1, step, m0);
}

/// Closed-form statement value 4³·3^{13/4}π ∫sech⁴.
inline double mass_fourth_derivative_statement() { return 64.0 * std::pow(3.0, 3.25) * pi * sech_moment(2); }

/// The order-2 intermediate integrand (-3/f⁴ + 20/f⁶ + 2/f² - 16/f⁴), f = cosh.
struct Order2Identity {
  Rational exact;
  double quadrature = 0.0;
};

inline Order2Identity mass_second_derivative_identity() {
  Order2Identity r;
  r.exact = (-3) * sech_moment_exact(2) + 20 * sech_moment_exact(3) + 2 * sech_moment_exact(1) +
            (-16) * sech_moment_exact(2);
  r.quadrature = pi * (-3.0 * sech_moment_quadrature(2) + 20.0 * sech_moment_quadrature(3) +
                       2.0 * sech_moment_quadrature(1) - 16.0 * sech_moment_quadrature(2));
  return r;
}

/// Fourth derivative through the β-parameterization, β = a√(2-a²).
struct BetaRoute {
  Rational moment_combination;  // -36·m1 + 639·m2 - 1800·m3 + 1260·m4
  double beta_route = 0.0;      // (2·12²π/3^{3/4}) × moment_combination
  double simplified = 0.0;      // (2·12²·3²π/3^{3/4}) ∫sech⁴
  double statement = 0.0;       // 4³·3^{13/4}π ∫sech⁴
  double dbeta_da_4 = 0.0;      // (dβ/da)⁴ at 0, by a central difference on β(a)
};

inline BetaRoute beta_fourth_derivative_check() {
  BetaRoute r;
  r.moment_combination = (-36) * sech_moment_exact(1) + 639 * sech_moment_exact(2) + (-1800) * sech_moment_exact(3) +
                         1260 * sech_moment_exact(4);
  const double pref = 2.0 * 144.0 * pi / std::pow(3.0, 0.75);
  r.beta_route = pref * r.moment_combination.value();
  r.simplified = pref * 9.0 * sech_moment(2);
  r.statement = mass_fourth_derivative_statement();
  auto beta = [](double a) { return a * std::sqrt(2.0 - a * a); };
  const double h = 1e-4;
  const double d1 = (beta(-2 * h) - 8 * beta(-h) + 8 * beta(h) - beta(2 * h)) / (12 * h);
  r.dbeta_da_4 = std::pow(d1, 4);
  return r;
}

// ---------------------------------------------------------------------------
// Expansion fits

struct ExpansionFit {
  int exponent = 0;
  double fitted_coefficient = 0.0;
  double predicted_coefficient = 0.0;
  double sample_lo = 0.0;
  double sample_hi = 0.0;
  double relative_deviation = 0.0;
  double fit_residual = 0.0;  // max abs residual of the least-squares model
  std::vector<double> samples;
  std::vector<double> values;
};

namespace detail {

/// Least squares of values against Σ c_j t^{powers[j]}; returns coefficients and max residual.
inline std::pair<Eigen::VectorXd, double> power_fit(const std::vector<double>& t, const std::vector<double>& values,
                                                    const std::vector<int>& powers) {
  if (t.size() < powers.size() + 1) throw std::domain_error("expansion fit: too few samples");
  Eigen::MatrixXd A(t.size(), powers.size());
  Eigen::VectorXd b(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < powers.size(); ++j) A(i, j) = std::pow(t[i], powers[j]);
    b(i) = values[i];
  }
  // Column scaling keeps the normal equations tame for t ~ 1e-2.
  Eigen::VectorXd scale(powers.size());
  for (std::size_t j = 0; j < powers.size(); ++j) {
    scale(j) = A.col(j).norm();
    A.col(j) /= scale(j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (qr.rank() < static_cast<Eigen::Index>(powers.size())) throw std::domain_error("expansion fit: ill-conditioned");
  Eigen::VectorXd coef = qr.solve(b);
  const double resid = (A * coef - b).cwiseAbs().maxCoeff();
  for (std::size_t j = 0; j < powers.size(); ++j) coef(j) /= scale(j);
  return {coef, resid};
}

inline void finish_fit(ExpansionFit& fit) {
  fit.sample_lo = *std::min_element(fit.samples.begin(), fit.samples.end());
  fit.sample_hi = *std::max_element(fit.samples.begin(), fit.samples.end());
  fit.relative_deviation = std::abs(fit.fitted_coefficient - fit.predicted_coefficient) /
                           std::abs(fit.predicted_coefficient);
}

}  // namespace detail

/// Quartic coefficient of γ₀(a) - 1, fitted with an a⁶ companion; predicted -∂ₐ⁴M|₀/(36 M(Q)).
inline ExpansionFit fit_gamma0_quartic(const std::vector<double>& a_samples, double d4_mass, MassCurve& curve) {
  ExpansionFit fit;
  fit.exponent = 4;
  fit.samples = a_samples;
  const double mq = curve(0.0);
  for (double a : a_samples) fit.values.push_back(std::pow(mq / curve(a), 2.0 / 3.0) - 1.0);
  const auto [coef, resid] = detail::power_fit(a_samples, fit.values, {4, 6});
  fit.fitted_coefficient = coef(0);
  fit.fit_residual = resid;
  fit.predicted_coefficient = -d4_mass / (36.0 * mq);
  detail::finish_fit(fit);
  return fit;
}

/// Slope of γ_l(a) at a = l against -2∂ₐM(l)/(3M(l)).
struct SlopeCheck {
  double measured = 0.0;
  double predicted = 0.0;
  double relative_deviation = 0.0;
};

inline SlopeCheck gamma_l_slope(double l, MassCurve& curve, double h = 1e-3) {
  SlopeCheck s;
  const double ml = curve(l);
  auto gam = [&](double a) { return std::pow(ml / curve(a), 2.0 / 3.0); };
  s.measured = (gam(l - 2 * h) - 8 * gam(l - h) + 8 * gam(l + h) - gam(l + 2 * h)) / (12 * h);
  const auto dm = mass_derivative_at(l, 0.01, curve);
  s.predicted = -2.0 * dm.value / (3.0 * ml);
  s.relative_deviation = std::abs(s.measured - s.predicted) / std::abs(s.predicted);
  return s;
}

/// ΔS = S_{4/√3}(Z((a,0), γ₀(a))) - S_{4/√3}(Q) for each sample.
inline std::vector<double> action_excess_at_zero(const std::vector<double>& a_samples, MassCurve& curve) {
  const Grid& g = curve.grid();
  const double c0 = critical_speed;
  const double s0 = action(zaitsev(0.0, g), c0).action;
  const double mq = curve(0.0);
  std::vector<double> out;
  for (double a : a_samples) {
    const double gamma = std::pow(mq / curve(a), 2.0 / 3.0);
    out.push_back(action(scaled_zaitsev({a, 0.0, gamma, 0.0}, g), c0).action - s0);
  }
  return out;
}

/// Sixth-order coefficient of the action excess at the critical speed, fitted
/// with an |a|⁸ nuisance term. The prediction is 5 c''(0) d4_mass / 6!.
inline ExpansionFit fit_action_sixth_order(const std::vector<double>& a_samples, double d4_mass, MassCurve& curve) {
  if (a_samples.size() < 4) throw std::domain_error("fit_action_sixth_order: need at least 4 samples");
  for (double a : a_samples) {
    if (a < 0.05 - 1e-12 || a > 0.2 + 1e-12) throw std::domain_error("fit_action_sixth_order: samples must lie in [0.05, 0.2]");
  }
  ExpansionFit fit;
  fit.exponent = 6;
  fit.samples = a_samples;
  fit.values = action_excess_at_zero(a_samples, curve);
  const auto [coef, resid] = detail::power_fit(a_samples, fit.values, {6, 8});
  fit.fitted_coefficient = coef(0);
  fit.fit_residual = resid;
  fit.predicted_coefficient = 5.0 * speed_second_derivative_at_zero() * d4_mass / 720.0;
  detail::finish_fit(fit);
  return fit;
}

/// Two-term prediction for the (|a| - l)² coefficient of S_{c(l)}(Z(a, γ_l(a))) - S_{c(l)}(Z(l)).
struct QuadraticPrediction {
  double dm_dl = 0.0;        // ∂ₐM(Z(a)) at a = l
  double dc_mass_q = 0.0;    // ∂_c ‖Q_c‖² at c = 4/√3
  double scaling_term = 0.0;
  double speed_term = 0.0;
  double total() const { return scaling_term + speed_term; }
};

inline QuadraticPrediction predict_action_quadratic(double l, MassCurve& curve) {
  QuadraticPrediction p;
  p.dm_dl = mass_derivative_at(l, 0.01, curve).value;
  // ‖Q_c‖² scales like c^{3/2}.
  const double mq = mass(line_soliton(critical_speed, curve.grid()));
  p.dc_mass_q = 1.5 * mq / critical_speed;
  const double ml = curve(l);
  p.scaling_term = p.dm_dl * p.dm_dl * p.dc_mass_q / (9.0 * ml * ml);
  p.speed_term = speed_derivative(l) * p.dm_dl / 2.0;
  return p;
}

/// Fit of the action excess at speed c(l) against (|a| - l)², with cubic and
/// quartic companions. `offsets` are the sampled values of |a| - l.
inline ExpansionFit fit_action_quadratic(double l, const std::vector<double>& offsets, MassCurve& curve) {
  if (!(l > 0.0) || l > 0.3) throw std::domain_error("fit_action_quadratic: l must lie in (0, 0.3]");
  const Grid& g = curve.grid();
  const double c = speed(l);
  const double ml = curve(l);
  const double s_l = action(zaitsev(l, g), c).action;
  ExpansionFit fit;
  fit.exponent = 2;
  fit.samples = offsets;
  for (double d : offsets) {
    const double a = l + d;
    const double gamma = std::pow(ml / curve(a), 2.0 / 3.0);
    fit.values.push_back(action(scaled_zaitsev({a, 0.0, gamma, 0.0}, g), c).action - s_l);
  }
  const auto [coef, resid] = detail::power_fit(offsets, fit.values, {2, 3, 4});
  fit.fitted_coefficient = coef(0);
  fit.fit_residual = resid;
  fit.predicted_coefficient = predict_action_quadratic(l, curve).total();
  detail::finish_fit(fit);
  return fit;
}

}  // namespace kpi
