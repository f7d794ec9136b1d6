#include <gtest/gtest.h>

#include <random>

#include "pushgate/thermal_nonuniform.hpp"

using namespace pushgate;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

XiMoments tw_quadrature(double xi0, double sigma, double x0, double w) {
  return xi_moments_quadrature([&](double x) { return xi_profile_travelling(x0, w, x); }, xi0,
                               sigma, w / 8);
}

XiMoments sw_quadrature(double xi0, double sigma, double k, double z0) {
  return xi_moments_quadrature([&](double z) { return xi_profile_standing(k, z0, z); }, xi0, sigma,
                               0.3 / k);
}

}  // namespace

TEST(Profiles, NormalizedAtEquilibrium) {
  EXPECT_EQ(xi_profile_travelling(1e-6, 2e-6, 0.0), 1.0);
  EXPECT_EQ(xi_profile_travelling(1e-6, 2e-6, 1e-6), 0.0);
  EXPECT_NEAR(xi_profile_standing(1.5e7, 0.4e-7, 0.0), 1.0, 1e-15);
  EXPECT_THROW(xi_profile_travelling(0.0, 2e-6, 0.0), std::domain_error);
  EXPECT_THROW(xi_profile_standing(1.0, 0.0, 0.0), std::domain_error);
  EXPECT_NEAR(offset_ratio(1e-6, 2e-6), 1.0, 1e-15);
}

TEST(Profiles, PositionSpreadIsThermal) {
  const IonSpecies ca = IonSpecies::calcium40();
  const TrapConfig t{2.0 * kPi * 1e6, 10e-6};
  const auto p = PositionDistribution::thermal(ca, t, 1e-3);
  EXPECT_NEAR(p.sigma, std::sqrt(codata::kBoltzmann * 1e-3 / (ca.mass * t.omega * t.omega)),
              1e-12 * p.sigma);
  EXPECT_NEAR(p.r(2e-6), p.sigma / 1e-6, 1e-15);
  EXPECT_THROW(PositionDistribution::thermal(ca, t, -1.0), std::invalid_argument);
}

TEST(TravellingMoments, SeriesCoefficientAtHalfWaist) {
  EXPECT_NEAR(tw_series_coefficients(2, 1.0)[0], -2.0, 1e-15);
  EXPECT_THROW(xi_moments_tw(1.0, 0.1, 0.0), std::domain_error);
  EXPECT_FALSE(xi_moments_tw(1.0, 0.31, 1.0).valid);
  EXPECT_TRUE(xi_moments_tw(1.0, 0.3, 1.0).valid);
}

TEST(TravellingMoments, SeriesMatchesQuadrature) {
  const double w = 2e-6;
  for (double big_r : {0.7, 1.0, 1.4})
    for (double r : {0.01, 0.03}) {
      const double x0 = big_r * w / 2;
      const double sigma = r * w / 2;
      const XiMoments s = xi_moments_tw(0.8, r, big_r);
      const XiMoments q = tw_quadrature(0.8, sigma, x0, w);
      for (int n = 2; n <= 8; n += 2)
        EXPECT_LT(rel(s(n), q(n)), 1e-4) << "R " << big_r << " r " << r << " n " << n;
    }
}

TEST(StandingMoments, ClosedFormMatchesQuadrature) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double k = 2.0 * kPi / 397e-9;
  for (int i = 0; i < 15; ++i) {
    const double ks = 1.5 * u(rng);
    const double kz0 = 0.15 + 1.25 * u(rng);
    const XiMoments c = xi_moments_sw(1.3, ks, kz0);
    const XiMoments q = sw_quadrature(1.3, ks / k, k, kz0 / k);
    for (int n = 2; n <= 8; n += 2)
      EXPECT_LT(rel(c(n), q(n)), 1e-6) << "k sigma " << ks << " k z0 " << kz0 << " n " << n;
  }
  EXPECT_THROW(xi_moments_sw(1.0, 0.1, 0.0), std::domain_error);
}

TEST(StandingMoments, Limits) {
  const XiMoments lo = xi_moments_sw(1.3, 1e-9, 0.6);
  const XiMoments pt = XiMoments::point(1.3);
  for (int n = 2; n <= 8; n += 2) EXPECT_NEAR(lo(n) / pt(n), 1.0, 1e-12);
  const XiMoments hi = xi_moments_sw(1.3, 10.0, kPi / 4);
  EXPECT_NEAR(hi(2), 1.3 * 1.3 / 2.0, 1e-14);
  EXPECT_NEAR(hi(4), 3.0 * std::pow(1.3, 4) / 8.0, 1e-14);
}

TEST(FullFidelity, PointMomentsReduceToUniformForce) {
  for (double kappa : {0.0, 3.0, 30.0}) {
    const double f = fidelity_nonuniform_full(kPi / 2, 0.9, XiMoments::point(0.9), kappa, 2e-3);
    EXPECT_NEAR(f, fidelity_echo_closed(kPi / 2, kappa, 2e-3), 1e-15);
  }
}

TEST(FullFidelity, TravellingClosedFormMatchesSeriesMoments) {
  // With r^2 = 4 kappa (a/w)^2 the two expansions agree on the leading
  // terms; the remainder is of relative order r^2.
  const double theta0 = kPi / 2, xi0 = 0.9, ad = 1e-3;
  for (double big_r : {0.6, 1.0, 1.5})
    for (double aw : {2e-3, 5e-3}) {
      const double kappa = 10.0;
      const double r = 2.0 * aw * std::sqrt(kappa);
      const double full = 1.0 - fidelity_nonuniform_full(theta0, xi0, xi_moments_tw(xi0, r, big_r),
                                                         kappa, ad);
      const double closed = 1.0 - fidelity_tw_closed(theta0, kappa, ad, aw, big_r);
      EXPECT_LT(rel(closed, full), 20.0 * r * r + 1e-6) << "R " << big_r << " a/w " << aw;
    }
  EXPECT_NEAR(tw_quartic(1.0), 4.0, 1e-15);
}

TEST(FullFidelity, TravellingOffsetTermVanishesAtHalfWaist) {
  const double with = fidelity_tw_closed(1.0, 5.0, 1e-3, 1e-2, 1.0);
  const double c = 30.0;
  const double want = 1.0 - c * c * 1e-12 - 2.0 / 9.0 * c * c * 1e-8 * 4.0;
  EXPECT_NEAR(with, want, 1e-15);
  EXPECT_THROW(fidelity_tw_closed(1.0, 5.0, 1e-3, 1e-2, 0.0), std::domain_error);
}

TEST(StandingClosed, LimitsAndFloor) {
  EXPECT_EQ(fidelity_sw_closed(kPi / 2, 0.2, 0.0), 1.0);
  EXPECT_NEAR(fidelity_sw_closed(kPi / 2, 0.2, 1e6), 1.0 - std::pow(kPi / 2, 2) / 32.0, 1e-15);
  EXPECT_NEAR(fidelity_sw_floor(kPi / 2, kPi / 4), 0.92289, 5e-5);
  double prev = 1.0;
  for (double kappa = 0.0; kappa < 50.0; kappa += 0.5) {
    const double f = fidelity_sw_closed(kPi / 2, 0.25, kappa);
    EXPECT_LE(f, prev);
    prev = f;
  }
}

TEST(StandingClosed, AgreesWithFullExpressionAboveNinety) {
  const double theta0 = kPi / 2, xi0 = 1.0, ad = 1e-4;
  for (double ka : {0.05, 0.2, 0.5})
    for (double kappa : {0.1, 1.0, 10.0, 100.0}) {
      const double ks = ka * std::sqrt(kappa);
      const double closed = fidelity_sw_closed(theta0, ka, kappa);
      if (closed < 0.9) continue;
      const double full =
          fidelity_nonuniform_full(theta0, xi0, xi_moments_sw(xi0, ks, kPi / 4), kappa, ad);
      EXPECT_NEAR(closed, full, 0.01) << "ka " << ka << " kappa " << kappa;
    }
}

TEST(LambDickeRegime, Flags) {
  const auto z = lamb_dicke(1.5e7, 1.6e-8, 0.0);
  EXPECT_EQ(z.k_sigma_sq, 0.0);
  EXPECT_TRUE(z.in_regime);
  const double k = 1.0, a = std::sqrt(2.0);
  EXPECT_FALSE(lamb_dicke(k, a, 1.0).in_regime);  // eta^2 <n> = 1
  // (k sigma)^2 with sigma = a sqrt(<n>).
  const auto ld = lamb_dicke(1.5e7, 1.6e-8, 4.0);
  EXPECT_NEAR(ld.k_sigma_sq, std::pow(1.5e7 * 1.6e-8 * 2.0, 2), 1e-15);
}

TEST(Moments, QuadratureSatisfiesJensen) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double w = 2e-6, x0 = (0.2 + u(rng)) * w, sigma = 0.3 * u(rng) * w;
    const XiMoments q = tw_quadrature(1.0, sigma, x0, w);
    EXPECT_GE(q(4) - q(2) * q(2), 0.0);
    EXPECT_GE(q(8) - q(4) * q(4), 0.0);
    const double f = fidelity_nonuniform_full(kPi / 2, 1.0, q, 5.0, 1e-3);
    EXPECT_LE(f, 1.0);
  }
}

TEST(NonuniformMonteCarlo, MatchesFullExpression) {
  const double w = 2e-6, x0 = 0.7e-6, a = 1.6e-8, kappa = 20.0;
  const double sigma = a * std::sqrt(kappa);
  const PhaseInputs in{0.9, 5.0, 0.35, 2e-3};
  const double theta0 = base_angle(in);
  const auto g = [&](double x) { return xi_profile_travelling(x0, w, x); };
  const XiMoments mom = tw_quadrature(in.xi, sigma, x0, w);
  const double ref = mean_vartheta_nonuniform(theta0, in.xi, mom, kappa, in.a_over_d);
  const auto mc = nonuniform_monte_carlo(in, g, sigma, kappa, ref, 20000, 3, 2);
  const double want = 1.0 - fidelity_nonuniform_full(theta0, in.xi, mom, kappa, in.a_over_d);
  EXPECT_NEAR(mc.echo_infidelity.mean, want, 3.0 * mc.echo_infidelity.std_error);
  EXPECT_NEAR(mc.vartheta.mean, ref, 3.0 * mc.vartheta.std_error);
  const auto again = nonuniform_monte_carlo(in, g, sigma, kappa, ref, 20000, 3, 5);
  EXPECT_EQ(mc.echo_infidelity.mean, again.echo_infidelity.mean);
}
