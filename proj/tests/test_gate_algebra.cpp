#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "pushgate/gate_algebra.hpp"

using namespace pushgate;

namespace {

std::array<double, 4> random_phases(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  return {u(rng), u(rng), u(rng), u(rng)};
}

}  // namespace

TEST(DiagonalGate, ConditionalPhaseAndNormalization) {
  const DiagonalGate g(0.3, -1.1, 2.0, 0.7);
  EXPECT_NEAR(g.conditional_phase(), 0.7 - 2.0 + 1.1 + 0.3, 1e-15);
  const DiagonalGate n = g.normalized();
  EXPECT_EQ(n[0], 0.0);
  EXPECT_NEAR(n[3], wrap_phase(0.7 - 0.3), 1e-15);
  EXPECT_THROW(DiagonalGate(0.0, NAN, 0.0, 0.0), std::invalid_argument);
}

TEST(DiagonalGate, LocalZMatchesKroneckerProduct) {
  const DiagonalGate g = DiagonalGate::local_z(0.4, -1.3);
  const Mat4 k = kron(SingleQubitOp::z(0.4).matrix(), SingleQubitOp::z(-1.3).matrix());
  EXPECT_LT((g.matrix() - k).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(g.conditional_phase(), 0.0, 1e-15);
}

TEST(DiagonalGate, LocalCorrectionLeavesConditionalGate) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto t = random_phases(rng, 3.0);
    const DiagonalGate g(t);
    const auto [s1, s2] = local_correction(g);
    const Mat4 out = kron(s1.matrix(), s2.matrix()) * g.matrix();
    const Mat4 want = DiagonalGate::conditional(g.conditional_phase()).matrix();
    // Equal up to a global phase.
    const cplx ph = out(0, 0) / want(0, 0);
    EXPECT_LT((out - ph * want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SingleQubitOp, PulsesAreUnitary) {
  EXPECT_TRUE(SingleQubitOp::flip().is_unitary());
  EXPECT_TRUE(SingleQubitOp::over_rotation(0.37).is_unitary());
  EXPECT_TRUE(SingleQubitOp::z(2.1).is_unitary());
  const Mat2 r2 = SingleQubitOp::flip().matrix() * SingleQubitOp::flip().matrix();
  EXPECT_LT((r2 + Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(States, ValidationRejectsBadInput) {
  EXPECT_THROW(TwoQubitState(Vec4(1.0, 1.0, 0.0, 0.0)), std::invalid_argument);
  const auto psi = TwoQubitState::normalize(Vec4(1.0, 1.0, 0.0, 0.0));
  EXPECT_NO_THROW(TwoQubitDensity::pure(psi));
  Mat4 bad = Mat4::Identity();
  EXPECT_THROW(TwoQubitDensity{bad}, std::invalid_argument);
  bad = Mat4::Zero();
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  EXPECT_THROW(TwoQubitDensity{bad}, std::invalid_argument);
}

TEST(MinStateFidelity, MatchesSimplexGrid) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    const auto t = random_phases(rng, i < 30 ? 0.3 : 3.1);
    const double want = 1.0 - 4.0 * oracle::simplex_grid_max(t);
    EXPECT_NEAR(min_state_fidelity_diag(t).fidelity, want, 1e-7) << "draw " << i;
  }
}

TEST(MinStateFidelity, ClosedFormsForSimplePatterns) {
  for (double th : {0.0, 0.1, 0.9, 1.5, 2.5, 3.1}) {
    // One qubit picks up a phase.
    EXPECT_NEAR(fidelity_min_diag(DiagonalGate(0.0, 0.0, th, th)), std::pow(std::cos(th / 2), 2), 1e-12);
    // Opposite phases on |01> and |10>.
    const double want = th <= kPi / 2 ? std::pow(std::cos(th), 2) : 0.0;
    EXPECT_NEAR(fidelity_min_diag(DiagonalGate(0.0, -th, th, 0.0)), want, 1e-12);
  }
}

TEST(MinStateFidelity, TinyPhasesKeepRelativePrecision) {
  // Infidelity of a small conditional error d is sin^2(d/2) ~ d^2 / 4.
  const double d = 1e-7;
  const double inf = min_state_fidelity_diag({d, 0.0, 0.0, d}).infidelity;
  EXPECT_NEAR(inf / (d * d / 4.0), 1.0, 1e-6);
}

TEST(MinStateOverlap, AgreesWithDiagonalCase) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const auto t = random_phases(rng, 2.0);
    EXPECT_NEAR(min_state_overlap_sq(DiagonalGate(t).matrix()), min_state_fidelity_diag(t).fidelity, 1e-10);
  }
}

TEST(MinStateOverlap, IsAMinimumOverRandomStates) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  Mat4 q;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q(i, j) = cplx(n01(rng), n01(rng)) * 0.2;
  q += Mat4::Identity();
  const double m = min_state_overlap_sq(q);
  for (int k = 0; k < 5000; ++k) {
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = cplx(n01(rng), n01(rng));
    v.normalize();
    EXPECT_GE(std::norm(v.dot(q * v)), m - 1e-12);
  }
}

TEST(EchoResidual, ExplicitMatrixProduct) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 40; ++i) {
    const auto t1 = random_phases(rng, 3.0);
    const auto t2 = random_phases(rng, 3.0);
    const double target = kPi / 2;
    const DiagonalGate res = echo_sequence_residual(DiagonalGate(t1), DiagonalGate(t2), target);
    // S' R G2 R G1 against diag{1, 1, 1, e^{2 i target}}.
    const oracle::M4 r = oracle::flip_pair();
    const oracle::M4 sp = oracle::diag({-target, 0.0, 0.0, target});
    const oracle::M4 act = sp * r * oracle::diag(t2) * r * oracle::diag(t1);
    const oracle::M4 err = oracle::diag({0.0, 0.0, 0.0, -2.0 * target}) * act;
    const cplx ref = err(0, 0);
    for (int k = 0; k < 4; ++k)
      EXPECT_NEAR(std::arg(err(k, k) / ref), res[k], 1e-12) << "draw " << i << " entry " << k;
  }
}

TEST(EchoResidual, EqualHalvesLeaveConditionalError) {
  const double vt = kPi / 2 + 0.01;
  const DiagonalGate g = DiagonalGate::conditional(vt) * DiagonalGate::local_z(0.3, -0.8);
  const DiagonalGate r = echo_sequence_residual(g, g, kPi / 2);
  EXPECT_NEAR(r[1], -0.01, 1e-12);
  EXPECT_NEAR(r[2], -0.01, 1e-12);
  EXPECT_NEAR(r[3], 0.0, 1e-12);
}

TEST(EchoPhaseErrors, RepeatedErrorsCancel) {
  PiPulseErrorModel e;
  e.phase_error1 = 0.2;
  e.phase_error2 = -0.1;
  e.phase_repeat1 = 1.0;
  e.phase_repeat2 = 1.0;
  EXPECT_NEAR(echo_fidelity_phase_errors(0.0, e), 1.0, 1e-14);
  e.phase_repeat1 = 0.0;
  EXPECT_LT(echo_fidelity_phase_errors(0.0, e), 0.999);
}

TEST(OverRotation, MatchesExplicitSequenceOracle) {
  const DiagonalGate g = DiagonalGate::conditional(kPi / 2) * DiagonalGate::local_z(0.7, 0.2);
  const double eps = 0.05;
  for (double p : {-1.0, 0.0, 1.0}) {
    Eigen::Matrix2cd m1, m2;
    m1 << std::cos(eps / 2), -std::sin(eps / 2), std::sin(eps / 2), std::cos(eps / 2);
    m2 << std::cos(p * eps / 2), -std::sin(p * eps / 2), std::sin(p * eps / 2), std::cos(p * eps / 2);
    const oracle::M4 ma = oracle::on_qubit(m1, 1) * oracle::on_qubit(m1, 2);
    const oracle::M4 mb = oracle::on_qubit(m2, 1) * oracle::on_qubit(m2, 2);
    const oracle::M4 r = oracle::flip_pair();
    const oracle::M4 gm = oracle::diag(g.phases());
    const oracle::M4 act = r * mb * gm * r * ma * gm;
    const oracle::M4 ideal = r * gm * r * gm;
    const oracle::M4 q = ideal.adjoint() * act;
    const double lib = echo_fidelity_overrotation(g, eps, p);
    EXPECT_NEAR(lib, oracle::unitary_min_overlap_sq(q), 1e-10) << "p = " << p;
  }
}

TEST(BitFlip, KrausOperatorsAreComplete) {
  const auto k = bitflip_kraus(0.03, 0.2);
  Mat4 sum = Mat4::Zero();
  for (const auto& m : k) sum += m.adjoint() * m;
  EXPECT_LT((sum - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(bitflip_kraus(-0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(bitflip_kraus(0.0, 1.1), std::invalid_argument);
}

TEST(BitFlip, SumOfOverlapsEqualsDensityMatrixFidelity) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01;
  const std::array<double, 4> ga{0.1, 0.5, -0.3, 1.9};
  const std::array<double, 4> ge{0.1, 0.5, -0.3, 1.85};
  const auto ks = bitflip_sequence_operators(DiagonalGate(ga), DiagonalGate(ge), 0.02, 0.05);
  for (int i = 0; i < 20; ++i) {
    Vec4 v;
    for (int j = 0; j < 4; ++j) v(j) = cplx(n01(rng), n01(rng));
    v.normalize();
    double lib = 0.0;
    for (const auto& k : ks) lib += std::norm(v.dot(k * v));
    EXPECT_NEAR(lib, oracle::bitflip_density_fidelity(ga, ge, 0.02, 0.05, v), 1e-13);
  }
}

TEST(BitFlip, MinimumIsBelowRandomStatesAndAttained) {
  const std::array<double, 4> ga{0.0, 0.3, -0.2, kPi / 2 + 0.1};
  const DiagonalGate g(ga);
  const auto m = echo_bitflip_minimum(g, g, 0.01, 0.03);
  EXPECT_NEAR(oracle::bitflip_density_fidelity(ga, ga, 0.01, 0.03, m.state), m.value, 1e-12);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 3000; ++i) {
    Vec4 v;
    for (int j = 0; j < 4; ++j) v(j) = cplx(n01(rng), n01(rng));
    v.normalize();
    EXPECT_GE(oracle::bitflip_density_fidelity(ga, ga, 0.01, 0.03, v), m.value - 1e-12);
  }
}

TEST(BitFlip, ZeroProbabilityIsPerfect) {
  const DiagonalGate g = DiagonalGate::conditional(kPi / 2);
  EXPECT_NEAR(echo_fidelity_bitflip(g, 0.0), 1.0, 1e-12);
}
