#include <gtest/gtest.h>

#include <cmath>

#include "kpi/functionals.hpp"

using namespace kpi;

namespace {

Grid grid() { return make_grid(512, 60.0, 32); }

}  // namespace

TEST(Functionals, LineSolitonEnergyInClosedForm) {
  // For Q = 3c sech²(√c x/2): ∫∫Q_x² = (48/5)π c^{5/2}, ∫∫Q³ = (576/5)π c^{5/2}, no transverse part.
  const Grid g = grid();
  const double c = 1.3;
  const EnergyParts e = energy_parts(line_soliton(c, g));
  EXPECT_NEAR(e.gradient, 48.0 / 5.0 * pi * std::pow(c, 2.5), 1e-9);
  EXPECT_NEAR(e.nonlocal, 0.0, 1e-20);
  EXPECT_NEAR(e.cubic, -192.0 / 5.0 * pi * std::pow(c, 2.5), 1e-9);
}

TEST(Functionals, ActionIsCriticalAtSolitons) {
  // d/dλ S(λZ) = 0 and d/dμ S(Z(μx, y)) = 0 at λ = μ = 1, by central differences.
  const Grid g = grid();
  for (double a : {0.0, 0.2}) {
    const Field z = zaitsev(a, g);
    const double c = speed(a);
    const double h = 1e-4;
    const double s_up = action((1.0 + h) * z, c).action;
    const double s_dn = action((1.0 - h) * z, c).action;
    EXPECT_NEAR((s_up - s_dn) / (2 * h), 0.0, 1e-6 * action(z, c).mass);
    auto dilated = [&](double mu) {
      return Field::sample(g, [&](double x, double y) {
        return detail::zaitsev_sample(a, 0.0, 1.0, mu * x, y, false).value;
      });
    };
    const double d_mu = (action(dilated(1.0 + h), c).action - action(dilated(1.0 - h), c).action) / (2 * h);
    EXPECT_NEAR(d_mu, 0.0, 1e-6 * action(z, c).mass) << "a = " << a;
  }
}

TEST(Functionals, EnergyRejectsYDependentMean) {
  const Grid g = grid();
  const Field f = Field::sample(g, [](double x, double y) { return std::exp(-x * x) * (1.0 + std::cos(y)); });
  EXPECT_THROW(energy(f), std::domain_error);
}

TEST(Functionals, AnchoredSecondAntiderivative) {
  // g = d²/dx² of a Gaussian-weighted profile; the anchored ∂ₓ⁻² returns it, not a shifted copy.
  const Grid g = make_grid(512, 40.0, 8);
  auto phi = [](double x, double y) { return std::exp(-x * x) * (1.0 + 0.5 * std::cos(y)); };
  const Field f = Field::sample(g, phi);
  const Field back = antideriv2_x_anchored(deriv_x(f, 2));
  EXPECT_LT(max_abs(back - f), 1e-11);
}

TEST(Functionals, OrbitDistanceRecoversShifts) {
  const Grid g = make_grid(512, 60.0, 32);
  const Field z = zaitsev(0.2, g);
  const Field shifted = translate(z, 3.7, 1.2);
  const OrbitDistance d = orbit_distance(shifted, z);
  EXPECT_LT(d.distance, 1e-9);
  EXPECT_NEAR(d.x0, 3.7, 1e-8);
  EXPECT_NEAR(d.y0, 1.2, 1e-8);
  EXPECT_GE(d.y0, -pi);
  EXPECT_LT(d.y0, pi);
  const OrbitDistance self = orbit_distance(z, z);
  EXPECT_LT(self.distance, 1e-12);
  EXPECT_NEAR(self.y0, 0.0, 1e-12);
}

TEST(Functionals, OrbitDistanceOfAnAdditivePerturbation) {
  // A far-separated bump is orthogonal to every translate that stays near it.
  const Grid g = make_grid(512, 60.0, 16);
  const Field z = zaitsev(0.0, g);
  const double xi = g.xi(40);
  const Field bump = Field::sample(g, [&](double x, double) { return 1e-3 * std::cos(xi * x); });
  const OrbitDistance d = orbit_distance(z + bump, z);
  const double expected = z1_norm(bump);
  EXPECT_NEAR(d.distance, expected, 1e-3 * expected);
}
