#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pushgate/phase_engine.hpp"

using namespace pushgate;

namespace {

const PhaseInputs kIn{0.8, 6.0, 0.35, 1e-3};
const GateGeometry kSame{0.2, -0.3, ForceSense::kSame};

double single_particle(const PhaseParts& p) {
  return p.kinetic1.phi1 + p.kinetic1.phi2 + p.kinetic2.phi1 + p.kinetic2.phi2 + p.potential1 +
         p.potential2;
}

}  // namespace

TEST(PhaseEngine, SingleParticlePhasesCancelInConditionalPhase) {
  for (ForceSense sense : {ForceSense::kSame, ForceSense::kOpposite}) {
    const GateGeometry g{0.4, 1.3, sense};
    const PhaseSet ps = gate_phases(kIn, g, {3.0, 1.5, 0.2, 2.9});
    const DiagonalGate local(single_particle(ps.parts[0]), single_particle(ps.parts[1]),
                             single_particle(ps.parts[2]), single_particle(ps.parts[3]));
    EXPECT_NEAR(local.conditional_phase(), 0.0, 1e-12);
  }
}

TEST(PhaseEngine, ConditionalPhaseIgnoresCommonMotionalPhase) {
  const MotionQuanta m{2.0, 5.0, 0.3, 1.7};
  const double ref = gate_phases(kIn, kSame, m).vartheta();
  for (double shift : {0.5, 2.0, 4.4}) {
    const MotionQuanta ms{m.e1, m.e2, m.psi1 + shift, m.psi2 + shift};
    EXPECT_NEAR(gate_phases(kIn, kSame, ms).vartheta(), ref, 1e-12 * std::abs(ref));
  }
}

TEST(PhaseEngine, ConditionalPhaseMatchesGateAngle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const PhaseInputs in{0.2 + 1.5 * u(rng), 5.0 + 5.0 * u(rng), 0.05 + 0.9 * u(rng),
                         std::pow(10.0, -4.0 + 2.0 * u(rng))};
    const MotionQuanta m{10.0 * u(rng), 10.0 * u(rng), 6.3 * u(rng), 6.3 * u(rng)};
    const double vt = gate_phases(in, kSame, m).vartheta();
    EXPECT_NEAR(vt, gate_angle_closed(in, m), 1e-11 * std::abs(vt));
  }
}

TEST(PhaseEngine, ThermalMeanMatchesMeanGateAngle) {
  for (double kappa : {0.0, 1.0, 20.0}) {
    const double vt = thermal_mean_phases(kIn, kSame, kappa).vartheta();
    EXPECT_NEAR(vt, mean_gate_angle(kIn, kappa), 1e-12 * vt);
  }
}

TEST(PhaseEngine, BaseAngleScalesAndInverts) {
  const double th = base_angle(kIn);
  PhaseInputs twice = kIn;
  twice.xi *= 2.0;
  EXPECT_NEAR(base_angle(twice), 4.0 * th, 1e-14);
  twice = kIn;
  twice.omega_tau *= 3.0;
  EXPECT_NEAR(base_angle(twice), 3.0 * th, 1e-14);
  const double omega = 2.0 * kPi * 1e6;
  const double tau = gate_time_for_angle(kIn.epsilon, omega, kIn.xi, th);
  EXPECT_NEAR(omega * tau, kIn.omega_tau, 1e-12);
  EXPECT_THROW(gate_time_for_angle(kIn.epsilon, omega, 0.0, th), std::invalid_argument);
}

TEST(PhaseEngine, CompactFormsMatchPerOrderForms) {
  for (int d : {-1, 0, 1})
    for (double b : {0.0, 0.7, 12.0}) {
      const auto c = coulomb_phases_compact(kIn, d, b);
      for (int n = 1; n <= 4; ++n) {
        const double per = coulomb_phase(kIn, n, d, b);
        EXPECT_NEAR(c[static_cast<std::size_t>(n - 1)], per, 1e-12 * std::max(1.0, std::abs(per)))
            << "n = " << n << " D = " << d;
      }
    }
  EXPECT_THROW(coulomb_phase(kIn, 5, 1, 0.0), std::invalid_argument);
}

TEST(PhaseEngine, CoulombTermsMatchTimeQuadrature) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    const PhaseInputs in{0.2 + 1.5 * u(rng), 5.0 + 5.0 * u(rng), 0.05 + 0.9 * u(rng),
                         std::pow(10.0, -4.0 + 2.0 * u(rng))};
    const MotionQuanta m{8.0 * u(rng), 8.0 * u(rng), 6.3 * u(rng), 6.3 * u(rng)};
    const int d = static_cast<int>(i % 5) - 2;
    for (int n = 1; n <= 4; ++n) {
      const double want = oracle::coulomb_phase_quadrature(n, d, in.xi, in.omega_tau, in.epsilon,
                                                           in.a_over_d, m.e1, m.e2, m.psi1, m.psi2,
                                                           true, 20000);
      EXPECT_NEAR(coulomb_phase(in, n, d, thermal_bracket(m)), want, 1e-6)
          << "draw " << i << " n = " << n;
    }
  }
}

TEST(PhaseEngine, CoulombTermsMatchUnaveragedQuadratureForSlowPulses) {
  // At omega tau >= 12 the terms linear in the oscillation are below 1e-7
  // without any phase averaging.
  const PhaseInputs in{0.9, 12.0, 0.3, 1e-3};
  const MotionQuanta m{4.0, 2.0, 0.4, 2.2};
  for (int n = 1; n <= 4; ++n) {
    const double want = oracle::coulomb_phase_quadrature(n, 1, in.xi, in.omega_tau, in.epsilon,
                                                         in.a_over_d, m.e1, m.e2, m.psi1, m.psi2,
                                                         false, 40000);
    EXPECT_NEAR(coulomb_phase(in, n, 1, thermal_bracket(m)), want, 1e-6) << "n = " << n;
  }
}

TEST(PhaseEngine, SloshingKineticPhaseIsSuppressed) {
  EXPECT_LT(std::abs(kinetic_phases(kIn, 1, 10.0, 0.0).phi2), 1e-6);
  PhaseInputs fast = kIn;
  fast.omega_tau = 1.0;
  EXPECT_GT(std::abs(kinetic_phases(fast, 1, 10.0, 0.0).phi2), 1e-2);
}

TEST(PhaseEngine, GlobalCoulombPhaseIsStateIndependent) {
  // Second order: -(eps/4) int U^2 ~ -(eps/4) B (2 window omega tau) for long windows.
  const MotionQuanta m{3.0, 1.0, 0.0, 0.0};
  const double q = coulomb_global_phase(kIn, 2, m);
  const double approx = -0.25 * kIn.epsilon * thermal_bracket(m) * 2.0 * kDefaultWindow * kIn.omega_tau;
  EXPECT_NEAR(q, approx, 0.02 * std::abs(approx));
}

TEST(ThermalMonteCarlo, EchoInfidelityMatchesClosedForm) {
  const PhaseInputs in{0.8, 6.0, 0.35, 3e-3};
  const double kappa = 5.0;
  const auto r = thermal_monte_carlo(in, kSame, kappa, 20000, 17, 2);
  const double want = 1.0 - fidelity_echo_closed(base_angle(in), kappa, in.a_over_d);
  EXPECT_NEAR(r.echo_infidelity.mean, want, 3.0 * r.echo_infidelity.std_error);
  EXPECT_NEAR(r.vartheta.mean, mean_gate_angle(in, kappa), 3.0 * r.vartheta.std_error);
}

TEST(ThermalMonteCarlo, NoEchoInfidelityMatchesSpreadOracle) {
  // Without echo the phases of |01> and |10> move in opposite directions by
  // c dB with c = 3 theta (a/d) / (sqrt2 xi); the worst state sees sin^2(c dB)
  // and Var B = 4 kappa^2.
  const PhaseInputs in{0.8, 6.0, 0.35, 1e-4};
  const double kappa = 2.0;
  const auto r = thermal_monte_carlo(in, kSame, kappa, 20000, 5, 2);
  const double c = 3.0 * base_angle(in) * in.a_over_d / (std::sqrt(2.0) * in.xi);
  EXPECT_NEAR(r.no_echo_infidelity.mean, 4.0 * c * c * kappa * kappa,
              3.0 * r.no_echo_infidelity.std_error);
}

TEST(ThermalMonteCarlo, DeterministicAcrossWorkerCounts) {
  const auto a = thermal_monte_carlo(kIn, kSame, 3.0, 5000, 99, 1);
  const auto b = thermal_monte_carlo(kIn, kSame, 3.0, 5000, 99, 4);
  EXPECT_EQ(a.echo_infidelity.mean, b.echo_infidelity.mean);
  EXPECT_EQ(a.echo_infidelity.std_error, b.echo_infidelity.std_error);
  EXPECT_EQ(a.vartheta.mean, b.vartheta.mean);
  const auto c = thermal_monte_carlo(kIn, kSame, 3.0, 5000, 100, 1);
  EXPECT_NE(a.vartheta.mean, c.vartheta.mean);
}

TEST(ThermalMonteCarlo, SingleSampleHasZeroError) {
  const auto r = thermal_monte_carlo(kIn, kSame, 3.0, 1, 1, 1);
  EXPECT_EQ(r.vartheta.std_error, 0.0);
  EXPECT_THROW(thermal_monte_carlo(kIn, kSame, 3.0, 0, 1, 1), std::invalid_argument);
}

TEST(ThermalMonteCarlo, SamplerHasBoltzmannMoments) {
  oracle::Running e, c;
  for (std::uint64_t i = 0; i < 200000; ++i) {
    SampleStream s(3, i);
    const MotionQuanta m = sample_motion(s, 4.0);
    e.add(m.e1);
    c.add(std::cos(m.psi1 - m.psi2));
  }
  EXPECT_NEAR(e.mean, 4.0, 3.0 * e.stderr_());
  EXPECT_NEAR(c.mean, 0.0, 3.0 * c.stderr_());
}
