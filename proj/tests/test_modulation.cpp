#include <gtest/gtest.h>

#include <cmath>

#include "kpi/modulation.hpp"

using namespace kpi;

namespace {

Grid grid() { return make_grid(512, 80.0, 16); }

}  // namespace

TEST(Modulation, ResidualVanishesAtThePlantedParameters) {
  const Grid g = grid();
  const SolitonParams p{0.1, -0.05, 1.03, 1.5};
  const auto r = residual_G(scaled_zaitsev(p, g), p);
  for (double v : r) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(Modulation, PlantedRoundTrip) {
  const Grid g = grid();
  for (const SolitonParams& p : {SolitonParams{0.1, 0.0, 1.05, 2.0}, SolitonParams{0.2, -0.15, 0.97, -5.3}}) {
    const ModulationState st = decompose(scaled_zaitsev(p, g));
    EXPECT_NEAR(st.params.gamma, p.gamma, 1e-8);
    EXPECT_NEAR(st.params.a1, p.a1, 1e-8);
    EXPECT_NEAR(st.params.a2, p.a2, 1e-8);
    EXPECT_NEAR(st.params.rho, p.rho, 1e-8);
    EXPECT_LT(max_abs(st.eta), 1e-8);
    EXPECT_LT(st.residual_history.back(), st.tolerance);
  }
}

TEST(Modulation, OrthogonalPerturbationIsTheRemainder) {
  const Grid g = grid();
  const ModulationFrame f = modulation_frame(1.02, 0.08, -0.05, g);
  Field w = orthogonalize(band_limited_noise(g, 11), f);
  for (const Field& d : f.directions) EXPECT_NEAR(inner(d, w) / (l2_norm(d) * l2_norm(w)), 0.0, 1e-12);
  w *= 1e-3 / z1_norm(w);
  const ModulationState st = decompose(f.z + w);
  EXPECT_NEAR(st.params.gamma, 1.02, 1e-9);
  EXPECT_NEAR(st.params.a1, 0.08, 1e-9);
  EXPECT_NEAR(st.params.a2, -0.05, 1e-9);
  EXPECT_LT(max_abs(st.eta - w), 1e-10);
}

TEST(Modulation, BandLimitedNoise) {
  const Grid g = grid();
  const Field a = band_limited_noise(g, 5);
  const Field b = band_limited_noise(g, 5);
  const Field c = band_limited_noise(g, 6);
  EXPECT_EQ(a.values, b.values);
  EXPECT_GT(max_abs(a - c), 1e-3);
  for (double m : x_means(a)) EXPECT_NEAR(m, 0.0, 1e-14);
  // Transverse content stays within |k| <= 3.
  const Spectrum2D s = forward(a);
  for (int j = 0; j < g.ny; ++j) {
    if (std::abs(g.ky(j)) <= 3) continue;
    for (int p = 0; p < g.nxh(); ++p) EXPECT_LT(std::abs(s(j, p)), 1e-14);
  }
}

TEST(Modulation, EqualMassSamples) {
  const Grid g = grid();
  for (double l : {0.0, 0.1}) {
    const PerturbedSample s = perturbed_sample(l, 5e-3, 3, g);
    const double ml = zaitsev_mass(l, g);
    EXPECT_NEAR(mass(s.u), ml, 1e-12 * ml);
    EXPECT_NO_THROW(require_equal_mass(s.u, l));
  }
  EXPECT_THROW(require_equal_mass(zaitsev(0.0, g), 0.1), std::domain_error);
}

TEST(Modulation, GapAndLyapunovSigns) {
  const Grid g = grid();
  for (double l : {0.0, 0.1}) {
    for (std::uint64_t seed : {1u, 2u}) {
      const PerturbedSample s = perturbed_sample(l, 5e-3, seed, g);
      const GapCheck gap = lemma6_gap_check(s.u, l, s.base);
      EXPECT_GE(gap.gamma_excess, -1e-10);
      EXPECT_GT(gap.eta_mass, 0.0);
      const LyapunovCheck ly = lyapunov_inequality_check(s.u, l, s.base);
      EXPECT_GT(ly.k, 0.0) << "l = " << l << " seed " << seed;
    }
  }
}

TEST(Modulation, InitialGuessFindsTheTranslate) {
  const Grid g = grid();
  const SolitonParams p{0.05, 0.02, 1.0, -7.0};
  const SolitonParams guess = modulation_initial_guess(scaled_zaitsev(p, g));
  EXPECT_NEAR(guess.rho, p.rho, 0.5);
  EXPECT_LT(guess.a_norm(), 0.9);
}
