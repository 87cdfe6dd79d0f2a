#include <gtest/gtest.h>

#include <cmath>

#include "kpi/spectral.hpp"

using namespace kpi;

namespace {

Grid small() { return make_grid(128, 20.0, 16); }

}  // namespace

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(127, 10.0, 16), std::invalid_argument);
  EXPECT_THROW(make_grid(128, -1.0, 16), std::invalid_argument);
  EXPECT_THROW(make_grid(2 * 11 * 13, 10.0, 16), std::invalid_argument);
  EXPECT_NO_THROW(make_grid(1024, 80.0, 32));
}

TEST(Spectral, DerivativesOfATrigonometricMode) {
  const Grid g = small();
  const double xi = 2.0 * pi * 3.0 / g.lx;
  const Field f = Field::sample(g, [&](double x, double y) { return std::sin(xi * x) * std::cos(2.0 * y); });
  const Field fx = Field::sample(g, [&](double x, double y) { return xi * std::cos(xi * x) * std::cos(2.0 * y); });
  const Field fyy = Field::sample(g, [&](double x, double y) { return -4.0 * std::sin(xi * x) * std::cos(2.0 * y); });
  EXPECT_LT(max_abs(deriv_x(f, 1) - fx), 1e-12);
  EXPECT_LT(max_abs(deriv_y(f, 2) - fyy), 1e-12);
  // ∂ₓ⁻¹ of sin is -cos/ξ (already mean zero).
  const Field anti = Field::sample(g, [&](double x, double y) { return -std::cos(xi * x) * std::cos(2.0 * y) / xi; });
  EXPECT_LT(max_abs(antideriv_x(f, 1) - anti), 1e-12);
}

TEST(Spectral, AntiderivativeNeedsZeroMean) {
  const Grid g = small();
  const Field f = Field::sample(g, [](double x, double y) { return 1.0 + std::cos(y) + 0.0 * x; });
  EXPECT_THROW(antideriv_x(f, 1), std::domain_error);
  EXPECT_NO_THROW(antideriv_x(remove_x_mean(f), 1));
}

TEST(Spectral, GaussianIntegralAndInner) {
  const Grid g = make_grid(256, 40.0, 8);
  const Field f = Field::sample(g, [](double x, double) { return std::exp(-x * x); });
  EXPECT_NEAR(integrate(f), std::sqrt(pi) * 2.0 * pi, 1e-12);
  EXPECT_NEAR(inner(f, f), std::sqrt(pi / 2.0) * 2.0 * pi, 1e-12);
}

TEST(Spectral, TranslateMatchesShiftedSamples) {
  const Grid g = make_grid(256, 40.0, 16);
  auto fn = [](double x, double y) { return std::exp(-x * x) * (1.0 + 0.3 * std::cos(y)); };
  const Field f = Field::sample(g, fn);
  const Field shifted = Field::sample(g, [&](double x, double y) { return fn(x - 1.3, y - 0.4); });
  EXPECT_LT(max_abs(translate(f, 1.3, 0.4) - shifted), 1e-12);
  // A whole grid step in y is a pure rotation of rows.
  EXPECT_LT(max_abs(translate(f, 0.0, 3.0 * g.dy()) - rotate_y(f, 3)), 1e-13);
}

TEST(Spectral, Z1NormOfSingleMode) {
  // cos(ξx + ky) has Z¹ norm² = (1 + ξ + k/ξ)² · area / 2.
  const Grid g = small();
  const int p = 4, k = 3;
  const double xi = g.xi(p);
  const Field f = Field::sample(g, [&](double x, double y) { return std::cos(xi * x + k * y); });
  const double w = 1.0 + xi + k / xi;
  EXPECT_NEAR(z1_norm(f), w * std::sqrt(g.area() / 2.0), 1e-10);
  EXPECT_NEAR(z1_norm_projected(f).norm, z1_norm(f), 1e-12);
  EXPECT_NEAR(z1_norm_projected(f).dropped, 0.0, 1e-12);
}

TEST(Spectral, Z1RejectsYDependentMean) {
  const Grid g = small();
  const Field f = Field::sample(g, [](double x, double y) { return std::exp(-x * x) + 0.1 * std::cos(y); });
  EXPECT_THROW(z1_norm(f), std::domain_error);
  const ProjectedZ1 pz = z1_norm_projected(f);
  // 0.1 cos y has L² norm² 0.01 · lx · π.
  EXPECT_NEAR(pz.dropped, 0.1 * std::sqrt(g.lx * pi), 1e-12);
}

TEST(Spectral, CubeIntegralIsExactForBandLimitedFields) {
  const Grid g = small();
  const double xi = g.xi(5);
  const Field f = Field::sample(g, [&](double x, double y) { return std::cos(xi * x) + std::sin(2.0 * y) * std::cos(2 * xi * x); });
  // Oracle: plain quadrature of the cube on a grid fine enough to hold it exactly.
  const Grid fine = make_grid(512, g.lx, 64);
  Field ff = Field::sample(fine, [&](double x, double y) {
    const double v = std::cos(xi * x) + std::sin(2.0 * y) * std::cos(2 * xi * x);
    return v * v * v;
  });
  EXPECT_NEAR(integral_of_cube(f), integrate(ff), 1e-10);
}

TEST(Spectral, DealiasKeepsTheTwoThirdsBand) {
  const Grid g = small();
  Spectrum2D s(g);
  for (auto& c : s.c) c = 1.0;
  dealias_two_thirds(s);
  for (int j = 0; j < g.ny; ++j)
    for (int p = 0; p < g.nxh(); ++p) {
      const bool inside = p <= g.nx / 3 && std::abs(g.ky(j)) <= g.ny / 3 && j != g.ny / 2;
      EXPECT_EQ(std::abs(s(j, p)) > 0.0, inside);
    }
}
