#include <gtest/gtest.h>

#include <cmath>

#include "kpi/lemma_lab.hpp"

using namespace kpi;

namespace {

/// Plain trapezoid of sech^{2k} on [-30, 30]; the integrand is below 1e-25 at the ends.
double trapezoid_sech_power(int k) {
  const int n = 60000;
  const double a = -30.0, h = 60.0 / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * std::pow(1.0 / std::cosh(a + i * h), 2 * k);
  }
  return s * h;
}

Grid lab_grid() { return make_grid(512, 60.0, 16); }

}  // namespace

TEST(Rational, ArithmeticReduces) {
  const Rational a = make_rational(6, -8);
  EXPECT_EQ(a.num, -3);
  EXPECT_EQ(a.den, 4);
  const Rational b = a + make_rational(1, 4);
  EXPECT_EQ(b.num, -1);
  EXPECT_EQ(b.den, 2);
  const Rational c = 4 * (a * make_rational(2, 3));
  EXPECT_EQ(c.num, -2);
  EXPECT_EQ(c.den, 1);
  EXPECT_THROW(make_rational(1, 0), std::domain_error);
}

TEST(SechMoments, ExactValues) {
  const long long num[] = {2, 4, 16, 32}, den[] = {1, 3, 15, 35};
  for (int k = 1; k <= 4; ++k) {
    const Rational m = sech_moment_exact(k);
    EXPECT_EQ(m.num, num[k - 1]);
    EXPECT_EQ(m.den, den[k - 1]);
  }
}

TEST(SechMoments, AgreeWithIndependentQuadrature) {
  for (int k = 1; k <= 6; ++k) {
    EXPECT_NEAR(sech_moment(k), trapezoid_sech_power(k), 1e-12) << "k = " << k;
    EXPECT_NEAR(sech_moment_quadrature(k), sech_moment(k), 1e-12) << "k = " << k;
  }
  EXPECT_THROW(sech_moment_exact(0), std::domain_error);
}

TEST(Richardson, DerivativesOfTheExponential) {
  for (int order = 1; order <= 4; ++order) {
    const auto d = detail::richardson_central([](double a) { return std::exp(a); }, order, 0.1, 1.0);
    EXPECT_NEAR(d.value, 1.0, 1e-7) << "order " << order;
    EXPECT_EQ(d.levels.size(), 3u);
    EXPECT_LT(d.richardson_error, 1e-5);
  }
}

TEST(Richardson, RoundoffGuard) {
  EXPECT_THROW(detail::richardson_central([](double a) { return std::exp(a); }, 4, 1e-4, 1.0), std::domain_error);
}

TEST(PowerFit, RecoversPolynomialCoefficients) {
  std::vector<double> t, v;
  for (double x = 0.05; x <= 0.2 + 1e-12; x += 0.025) {
    t.push_back(x);
    v.push_back(3.0 * std::pow(x, 6) - 40.0 * std::pow(x, 8));
  }
  const auto [coef, resid] = detail::power_fit(t, v, {6, 8});
  EXPECT_NEAR(coef(0), 3.0, 1e-8);
  EXPECT_NEAR(coef(1), -40.0, 1e-6);
  EXPECT_LT(resid, 1e-14);
}

TEST(MassDerivatives, OddOrdersVanishAndFourthMatchesTheMomentRoute) {
  MassCurve curve(lab_grid());
  EXPECT_NEAR(mass_derivative_at_zero(1, 0.05, curve).value, 0.0, 1e-6);
  EXPECT_NEAR(mass_derivative_at_zero(2, 0.05, curve).value, 0.0, 1e-6);
  EXPECT_NEAR(mass_derivative_at_zero(3, 0.05, curve).value, 0.0, 1e-6);
  // 2·12²·3²·π / 3^{3/4} · ∫sech⁴.
  const double moment_route = 2.0 * 144.0 * 9.0 * pi / std::pow(3.0, 0.75) * (4.0 / 3.0);
  EXPECT_NEAR(mass_derivative_at_zero(4, 0.05, curve).value, moment_route, 1e-3 * moment_route);
  EXPECT_THROW(mass_derivative_at_zero(5, 0.05, curve), std::domain_error);
  EXPECT_THROW(mass_derivative_at_zero(2, 0.3, curve), std::domain_error);
}

TEST(MassDerivatives, BetaRouteConsistency) {
  const BetaRoute b = beta_fourth_derivative_check();
  EXPECT_EQ(b.moment_combination.num, 12);
  EXPECT_EQ(b.moment_combination.den, 1);
  EXPECT_NEAR(b.beta_route, b.simplified, 1e-10 * b.simplified);
  EXPECT_NEAR(b.dbeta_da_4, 4.0, 1e-8);
  EXPECT_NEAR(b.statement, 256.0 * std::pow(3.0, 2.25) * pi, 1e-9);
  const Order2Identity o2 = mass_second_derivative_identity();
  EXPECT_EQ(o2.exact.num, 0);
  EXPECT_NEAR(o2.quadrature, 0.0, 1e-12);
}

TEST(Expansions, GammaQuarticAgainstMeasuredFourthDerivative) {
  MassCurve curve(lab_grid());
  const double d4 = mass_derivative_at_zero(4, 0.05, curve).value;
  const ExpansionFit fit = fit_gamma0_quartic({0.02, 0.04, 0.06, 0.08, 0.1, 0.12}, d4, curve);
  EXPECT_LT(fit.relative_deviation, 0.02);
  EXPECT_NEAR(fit.predicted_coefficient, -0.25, 2e-3);
}

TEST(Expansions, SampleRangeIsChecked) {
  MassCurve curve(lab_grid());
  EXPECT_THROW(fit_action_sixth_order({0.01, 0.05, 0.1, 0.2}, 4763.0, curve), std::domain_error);
  EXPECT_THROW(fit_action_sixth_order({0.05, 0.1, 0.2}, 4763.0, curve), std::domain_error);
  EXPECT_THROW(fit_action_quadratic(0.0, {-0.01, 0.01, 0.02, 0.03}, curve), std::domain_error);
}

TEST(Expansions, QuadraticCoefficientIsPositive) {
  MassCurve curve(lab_grid());
  const ExpansionFit fit = fit_action_quadratic(0.1, {-0.02, -0.01, -0.005, 0.005, 0.01, 0.02}, curve);
  EXPECT_GT(fit.fitted_coefficient, 0.0);
  EXPECT_LT(fit.relative_deviation, 0.1);
}
