#include <gtest/gtest.h>

#include <cmath>

#include "kpi/functionals.hpp"

using namespace kpi;

namespace {

Grid grid() { return make_grid(1024, 80.0, 64); }

double sech(double z) { return 1.0 / std::cosh(z); }

}  // namespace

TEST(Solitons, SpeedAtTheBranchPoint) {
  EXPECT_NEAR(speed(0.0), 4.0 / std::sqrt(3.0), 1e-15);
  // c'(a) and c''(0) against central differences of c(a).
  for (double a : {0.1, 0.3, 0.6}) {
    const double h = 1e-5;
    EXPECT_NEAR(speed_derivative(a), (speed(a + h) - speed(a - h)) / (2 * h), 1e-8);
  }
  const double h = 1e-3;
  EXPECT_NEAR(speed_second_derivative_at_zero(), (speed(h) - 2 * speed(0.0) + speed(h)) / (h * h), 1e-5);
}

TEST(Solitons, LineSolitonClosedForm) {
  const Grid g = grid();
  const double c = 1.7;
  const Profile1D q = line_soliton_profile(c, g);
  for (int i = 0; i < g.nx; i += 17) {
    const double x = g.x(i);
    EXPECT_NEAR(q[i], 3.0 * c * std::pow(sech(0.5 * std::sqrt(c) * x), 2), 1e-13);
  }
  // -Q'' + cQ - Q²/2 = 0.
  Profile1D r = deriv_x(q, 2);
  for (int i = 0; i < g.nx; ++i) r[i] = -r[i] + c * q[i] - 0.5 * q[i] * q[i];
  EXPECT_LT(max_abs(r), 1e-10);
}

TEST(Solitons, LineSolitonMass) {
  // ∫∫ (3c sech²(√c x/2))² = 48π c^{3/2}.
  const Grid g = grid();
  const double c = critical_speed;
  EXPECT_NEAR(mass(line_soliton(c, g)), 48.0 * pi * std::pow(c, 1.5), 1e-9);
  EXPECT_NEAR(48.0 * pi * std::pow(c, 1.5), 128.0 * std::pow(3.0, 0.25) * pi, 1e-10);
}

TEST(Solitons, ZaitsevReducesToTheLineSoliton) {
  const Grid g = grid();
  EXPECT_LT(max_abs(zaitsev(0.0, g) - line_soliton(critical_speed, g)), 1e-12);
}

TEST(Solitons, ZaitsevIsStationary) {
  const Grid g = grid();
  for (double a : {0.05, 0.2, 0.4}) {
    EXPECT_LT(max_abs(stationary_residual(zaitsev(a, g), speed(a))), 1e-8) << "a = " << a;
  }
}

TEST(Solitons, ZaitsevSymmetries) {
  const Grid g = grid();
  const Field z = zaitsev(0.3, g);
  // Even in x and under y -> -y.
  for (int j = 0; j < g.ny; j += 5)
    for (int i = 1; i < g.nx; i += 13) {
      EXPECT_NEAR(z(i, j), z(g.nx - i, j), 1e-12);
      EXPECT_NEAR(z(i, j), z(i, (g.ny - j) % g.ny), 1e-12);
    }
  // Negative a is the half-period shift in y.
  EXPECT_LT(max_abs(zaitsev_even(-0.3, g) - translate(z, 0.0, -pi)), 1e-11);
}

TEST(Solitons, RotatedBranchParameterIsAYShift) {
  const Grid g = grid();
  const double a = 0.25, theta = 2.0 * g.dy();
  const Field rotated = scaled_zaitsev({a * std::cos(theta), a * std::sin(theta), 1.0, 0.0}, g);
  EXPECT_LT(max_abs(rotated - translate(zaitsev(a, g), 0.0, -theta)), 1e-11);
}

TEST(Solitons, AnalyticBranchDerivativesMatchFiniteDifferences) {
  const Grid g = make_grid(256, 40.0, 16);
  const SolitonParams p{0.12, -0.07, 1.03, 0.8};
  const auto [d1, d2] = zaitsev_a_derivatives(p, g);
  const double h = 1e-5;
  auto shifted = [&](double da1, double da2) {
    return scaled_zaitsev({p.a1 + da1, p.a2 + da2, p.gamma, p.rho}, g);
  };
  Field fd1 = shifted(h, 0) - shifted(-h, 0);
  fd1 *= 1.0 / (2 * h);
  Field fd2 = shifted(0, h) - shifted(0, -h);
  fd2 *= 1.0 / (2 * h);
  EXPECT_LT(max_abs(d1 - fd1), 1e-7 * max_abs(d1) + 1e-9);
  EXPECT_LT(max_abs(d2 - fd2), 1e-7 * max_abs(d2) + 1e-9);
}

TEST(Solitons, BranchTangentIsTheADerivativeAtZero) {
  // ∂ₐZ at a = 0 is v_*(x) cos y.
  const Grid g = grid();
  const auto [d1, d2] = zaitsev_a_derivatives({0.0, 0.0, 1.0, 0.0}, g);
  const Field expected = times_cos_y(vstar(g), g);
  EXPECT_LT(max_abs(d1 - expected), 1e-9);
  // Closed form of v_* against the spectral derivative of its antiderivative.
  EXPECT_LT(max_abs(vstar(g) - Profile1D::sample(g, vstar_value)), 1e-10);
}

TEST(Solitons, KernelGeneratorDerivative) {
  const Grid g = make_grid(512, 30.0, 8);
  for (double mu : {1.0, std::sqrt(3.0), -std::sqrt(3.0), 0.5}) {
    const double h = 1e-6;
    for (double x : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
      const double fd = (g_mu_value(mu, x + h) - g_mu_value(mu, x - h)) / (2 * h);
      EXPECT_NEAR(g_mu_dx_value(mu, x), fd, 1e-6 * std::max(1.0, std::abs(fd))) << mu << " " << x;
    }
  }
  // g_1 = 3 sech(3^{-1/4} x).
  for (double x : {-10.0, -1.0, 0.0, 2.0, 12.0, 14.9}) {
    EXPECT_NEAR(g_mu_value(1.0, x), 3.0 * sech(x / std::pow(3.0, 0.25)), 1e-13);
  }
  EXPECT_THROW(g_mu(400.0, g), std::overflow_error);
}

TEST(Solitons, MassMatchingScale) {
  const Grid g = make_grid(512, 60.0, 16);
  EXPECT_NEAR(gamma_l(0.1, 0.1, g), 1.0, 1e-15);
  // γ Z(a)(√γ x, y) has mass γ^{3/2} M(Z(a)), so γ_l equalizes masses.
  const double gam = gamma_l(0.2, 0.1, g);
  EXPECT_NEAR(mass(scaled_zaitsev({0.1, 0.0, gam, 0.0}, g)), zaitsev_mass(0.2, g), 1e-8 * zaitsev_mass(0.2, g));
  EXPECT_THROW(gamma_l(-0.1, 0.1, g), std::domain_error);
}

TEST(Solitons, PreconditionsAreEnforced) {
  const Grid g = grid();
  EXPECT_THROW(zaitsev(1.0, g), std::domain_error);
  EXPECT_THROW(zaitsev(-0.1, g), std::domain_error);
  EXPECT_THROW(scaled_zaitsev({0.8, 0.8, 1.0, 0.0}, g), std::domain_error);
  EXPECT_THROW(scaled_zaitsev({0.1, 0.0, -1.0, 0.0}, g), std::domain_error);
}
