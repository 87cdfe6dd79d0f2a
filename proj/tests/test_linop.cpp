#include <gtest/gtest.h>

#include <cmath>

#include "kpi/linop.hpp"

using namespace kpi;

namespace {

Grid grid() { return make_grid(512, 80.0, 8); }

}  // namespace

TEST(Linop, BasisIsOrthonormal) {
  const Grid g = grid();
  for (bool with_constant : {false, true}) {
    const FourierBasis b = FourierBasis::make(g, with_constant);
    EXPECT_EQ(b.size(), with_constant ? g.nx - 1 : g.nx - 2);
    const Eigen::MatrixXd gram = b.samples.transpose() * b.samples;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Linop, L0MatchesThePoschlTellerSpectrum) {
  // With z = √c x/2, L0 = (c/4)(-∂_z² + 4 - 12 sech² z): bound states -5c/4, 0, 3c/4.
  const Grid g = grid();
  for (double c : {critical_speed, 1.0, 2.0}) {
    const OperatorMatrix m = build_L(0, c, g);
    EXPECT_LT(m.symmetry_defect(), 1e-12);
    const SpectrumReport r = spectrum(m, 3, deriv_x(line_soliton_profile(c, g), 1));
    EXPECT_NEAR(r.eigenvalues[0], -1.25 * c, 1e-9) << "c = " << c;
    EXPECT_NEAR(r.eigenvalues[1], 0.0, 1e-9);
    EXPECT_NEAR(r.eigenvalues[2], 0.75 * c, 1e-9);
    EXPECT_EQ(r.negative_count, 1);
    ASSERT_EQ(r.near_zero.size(), 1u);
    EXPECT_GT(r.near_zero[0].overlap, 0.999999);
  }
}

TEST(Linop, ApplyAgreesWithTheDifferentialForm) {
  // L_n u = -u'' - n² ∂ₓ⁻² u + (c - Q) u for mean-zero u.
  const Grid g = grid();
  const double c = critical_speed;
  const Profile1D q = line_soliton_profile(c, g);
  const Profile1D u = Profile1D::sample(g, [](double x) { return x * std::exp(-0.3 * x * x); });
  for (int n : {0, 1, 2}) {
    const Profile1D lu = apply(build_L(n, c, g), u);
    Profile1D expected = deriv_x(u, 2);
    const Profile1D inv2 = antideriv_x(u, 2);
    for (int i = 0; i < g.nx; ++i) expected[i] = -expected[i] - n * n * inv2[i] + (c - q[i]) * u[i];
    EXPECT_LT(max_abs(lu - expected), 1e-10) << "n = " << n;
  }
  const Profile1D fu = apply(build_fourth_order(c, g), u);
  EXPECT_LT(max_abs(fu - apply_fourth_order_local(u, c)), 1e-9);
}

TEST(Linop, TransverseModesArePositiveAtTheCriticalSpeed) {
  const Grid g = grid();
  for (int n : {2, 3}) {
    const SpectrumReport r = spectrum(build_L(n, critical_speed, g), 2);
    EXPECT_GT(r.eigenvalues[0], 0.0) << "n = " << n;
    EXPECT_EQ(r.negative_count, 0);
  }
  EXPECT_THROW(build_L(-1, critical_speed, g), std::domain_error);
  EXPECT_THROW(build_L(1, -1.0, g), std::domain_error);
}

TEST(Linop, FourthOrderKernel) {
  const Grid g = grid();
  const double c = critical_speed;
  const Profile1D g1 = g_mu_dx(1.0, g);
  const OperatorMatrix f = build_fourth_order(c, g);
  EXPECT_LT(max_abs(apply(f, g1)), 1e-6);
  const SpectrumReport r = spectrum(f, 3, g1);
  EXPECT_EQ(r.negative_count, 0);
  ASSERT_EQ(r.near_zero.size(), 1u);
  EXPECT_GT(r.near_zero[0].overlap, 0.999);
  EXPECT_GE(r.eigenvalues[1], 0.95);
  EXPECT_DOUBLE_EQ(r.essential_edge, 1.0);
}

TEST(Linop, ConstrainedCoercivity) {
  const Grid g = grid();
  const double c = critical_speed;
  const Profile1D q = line_soliton_profile(c, g);
  const OperatorMatrix l0 = build_L(0, c, g);
  EXPECT_LT(coercivity_constant(l0, {}), 0.0);
  EXPECT_GT(coercivity_constant(l0, {q, deriv_x(q, 1)}), 0.0);
  const OperatorMatrix l1 = build_L(1, c, g);
  EXPECT_NEAR(coercivity_constant(l1, {}), 0.0, 1e-6);
  EXPECT_GT(coercivity_constant(l1, {vstar(g)}), 0.0);
  EXPECT_THROW(coercivity_constant(l0, {q, q}), std::domain_error);
}

TEST(Linop, SpeedDichotomy) {
  const auto rows = coercivity_vs_speed({1.5, critical_speed, 3.0}, grid());
  EXPECT_GT(rows[0].smallest, 0.0);
  EXPECT_NEAR(rows[1].smallest, 0.0, 1e-4);
  EXPECT_LT(rows[2].smallest, 0.0);
  EXPECT_THROW(coercivity_vs_speed({4.5}, grid()), std::domain_error);
}

TEST(Linop, GrowingKernelProfiles) {
  const Grid g = make_grid(512, 40.0, 8);
  for (double mu : {std::sqrt(3.0), -std::sqrt(3.0)}) {
    const KernelResidual kr = local_kernel_residual(windowed_g_mu_dx(mu, g), critical_speed, 5.0);
    EXPECT_LT(kr.relative, 1e-4) << "mu = " << mu;
  }
  // A non-kernel profile leaves an O(1) residual.
  const KernelResidual off = local_kernel_residual(windowed_g_mu_dx(0.5, g), critical_speed, 5.0);
  EXPECT_GT(off.relative, 1e-2);
}

TEST(Linop, ErfWindow) {
  const Grid g = grid();
  const Profile1D w = erf_window(g, 9.0, 0.7);
  for (int i = 0; i < g.nx; ++i) {
    const double x = std::abs(g.x(i));
    if (x < 9.0 - 5 * 0.7) EXPECT_NEAR(w[i], 1.0, 1e-12);
    if (x > 9.0 + 5 * 0.7) EXPECT_NEAR(w[i], 0.0, 1e-12);
  }
}
