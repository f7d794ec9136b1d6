#pragma once

// Dynamical phases Theta_ab of the pushing gate: kinetic, potential and the
// Coulomb Taylor orders n = 1..4, with thermal means, closed-form fidelities
// and a deterministic Monte Carlo over the Boltzmann ensemble.
//
// Core formulas are dimensionless: lengths in a, times in 1/omega, energies
// in hbar omega.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pushgate/constants.hpp"
#include "pushgate/gate_algebra.hpp"
#include "pushgate/parallel.hpp"
#include "pushgate/rng.hpp"
#include "pushgate/trap_dynamics.hpp"

namespace pushgate {

struct PhaseInputs {
  double xi = 0.0;
  double omega_tau = 0.0;
  double epsilon = 0.0;
  double a_over_d = 0.0;
};

inline PhaseInputs phase_inputs(const IonSpecies& ion, const TrapConfig& trap,
                                const ForcePulse& pulse) {
  return {pulse.xi, trap.omega * pulse.tau, coulomb_parameter(ion, trap),
          ground_state_length(ion, trap) / trap.d};
}

/// Whether the force on ion 2 points the same way as on ion 1.
enum class ForceSense { kSame, kOpposite };

/// Offsets s, s' of the linearized light-shift potentials, in units of a.
struct GateGeometry {
  double s = 0.0;
  double s_prime = 0.0;
  ForceSense sense = ForceSense::kSame;
};

/// Oscillation energies in units of hbar omega and phases.
struct MotionQuanta {
  double e1 = 0.0;
  double e2 = 0.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
};

inline MotionQuanta to_quanta(const MotionState& m, double omega) {
  const double hw = codata::kHbar * omega;
  return {m.e1 / hw, m.e2 / hw, m.psi1, m.psi2};
}

/// theta = sqrt(pi/8) eps omega tau xi^2.
inline double base_angle(const PhaseInputs& in) {
  return std::sqrt(kPi / 8.0) * in.epsilon * in.omega_tau * in.xi * in.xi;
}

/// E1 + E2 - 2 sqrt(E1 E2) cos(psi1 - psi2), in units of hbar omega.
inline double thermal_bracket(const MotionQuanta& m) {
  return m.e1 + m.e2 - 2.0 * std::sqrt(m.e1 * m.e2) * std::cos(m.psi1 - m.psi2);
}

struct KineticPhases {
  double phi1 = 0.0;  // adiabatic part
  double phi2 = 0.0;  // sloshing part, suppressed as exp(-(omega tau)^2 / 2)
};

inline KineticPhases kinetic_phases(const PhaseInputs& in, int alpha, double energy_quanta,
                                    double psi) {
  const double a = alpha;
  const double wt = in.omega_tau;
  return {-a * a * in.xi * in.xi * std::sqrt(kPi / 8.0) / wt,
          -a * wt * in.xi * std::exp(-0.5 * wt * wt) *
              std::sqrt(2.0 * kPi * energy_quanta) * std::cos(psi)};
}

/// Potential phase of ion 1 (ion == 1) or ion 2 (ion == 2) in internal
/// state `state`. A reversed force on ion 2 flips the sign of the s' term.
inline double potential_phase(const PhaseInputs& in, const GateGeometry& g, int ion, int state) {
  const double b = state;
  const double wt = in.omega_tau;
  const double quad = std::sqrt(kPi / 8.0) * b * wt * in.xi * in.xi;
  if (ion == 1) return quad - std::sqrt(kPi) * b * wt * in.xi * g.s;
  const double sign = g.sense == ForceSense::kOpposite ? 1.0 : -1.0;
  return quad + sign * std::sqrt(kPi) * b * wt * in.xi * g.s_prime;
}

/// Relative displacement factor alpha - beta, or alpha + beta for opposite forces.
inline int displacement_factor(int alpha, int beta, ForceSense sense) {
  return sense == ForceSense::kSame ? alpha - beta : alpha + beta;
}

/// Coulomb phase of Taylor order n for relative displacement factor D and
/// thermal bracket B, without the state-independent part Q_n. Terms carrying
/// exp(-c (omega tau)^2) are dropped.
inline double coulomb_phase(const PhaseInputs& in, int n, int dfac, double bracket) {
  const double d = dfac;
  const double ewx = in.epsilon * in.omega_tau * in.xi;
  const double ad = in.a_over_d;
  switch (n) {
    case 1:
      return -std::sqrt(kPi) / 4.0 * d * ewx / ad;
    case 2:
      return -std::sqrt(kPi / 32.0) * d * d * ewx * in.xi;
    case 3:
      return -std::sqrt(kPi / 48.0) * d * d * d * ewx * in.xi * in.xi * ad -
             0.75 * std::sqrt(kPi) * d * ewx * ad * bracket;
    case 4:
      return -std::sqrt(kPi) / 8.0 * d * d * d * d * ewx * in.xi * in.xi * in.xi * ad * ad -
             std::sqrt(9.0 * kPi / 8.0) * d * d * ewx * in.xi * ad * ad * bracket;
    default:
      throw std::invalid_argument("coulomb_phase: order must be 1..4");
  }
}

/// Compact theta form of the same four orders, valid for |D| <= 1 where
/// D^3 = D and D^4 = D^2.
inline std::array<double, 4> coulomb_phases_compact(const PhaseInputs& in, int dfac,
                                                    double bracket) {
  const double th = base_angle(in);
  const double d = dfac;
  const double ad = in.a_over_d;
  const double r2 = std::sqrt(2.0);
  return {-d * th / (ad * in.xi * r2), -d * d * th / 2.0,
          -d * d * d * th * ad * (in.xi / std::sqrt(6.0) + 3.0 * bracket / (in.xi * r2)),
          -d * d * d * d * th * ad * ad * (in.xi * in.xi / std::sqrt(8.0) + 3.0 * bracket)};
}

/// State-independent Coulomb phase Q_n over +-window tau. It is a global
/// phase and never enters a fidelity.
inline double coulomb_global_phase(const PhaseInputs& in, int n, const MotionQuanta& m,
                                   double window = kDefaultWindow) {
  const double a1 = std::sqrt(2.0 * m.e1);
  const double a2 = std::sqrt(2.0 * m.e2);
  auto u = [&](double s) {
    return std::pow(a1 * std::cos(s + m.psi1) - a2 * std::cos(s + m.psi2), n);
  };
  const double lim = window * in.omega_tau;
  const double integral = detail::integrate(u, -lim, lim, 1e-13);
  return -0.25 * in.epsilon * std::pow(in.a_over_d, n - 2) * integral;
}

struct PhaseParts {
  KineticPhases kinetic1;
  KineticPhases kinetic2;
  double potential1 = 0.0;
  double potential2 = 0.0;
  std::array<double, 4> coulomb{};

  double total() const {
    return kinetic1.phi1 + kinetic1.phi2 + kinetic2.phi1 + kinetic2.phi2 + potential1 +
           potential2 + coulomb[0] + coulomb[1] + coulomb[2] + coulomb[3];
  }
};

/// The four dynamical phases decomposed by origin, indexed |00>, |01>, |10>, |11>.
struct PhaseSet {
  std::array<PhaseParts, 4> parts;

  DiagonalGate gate() const {
    return {parts[0].total(), parts[1].total(), parts[2].total(), parts[3].total()};
  }
  double vartheta() const { return gate().conditional_phase(); }
};

/// Phases of all four joint states for one motional configuration.
inline PhaseSet gate_phases(const PhaseInputs& in, const GateGeometry& g, const MotionQuanta& m) {
  const double b = thermal_bracket(m);
  PhaseSet out;
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta) {
      PhaseParts& p = out.parts[static_cast<std::size_t>(2 * alpha + beta)];
      p.kinetic1 = kinetic_phases(in, alpha, m.e1, m.psi1);
      p.kinetic2 = kinetic_phases(in, beta, m.e2, m.psi2);
      p.potential1 = potential_phase(in, g, 1, alpha);
      p.potential2 = potential_phase(in, g, 2, beta);
      const int dfac = displacement_factor(alpha, beta, g.sense);
      for (int n = 1; n <= 4; ++n) p.coulomb[static_cast<std::size_t>(n - 1)] = coulomb_phase(in, n, dfac, b);
    }
  return out;
}

/// theta{1 + (a/d)^2 [xi^2/sqrt2 + 6 B]} for same-direction forces.
inline double gate_angle_closed(const PhaseInputs& in, const MotionQuanta& m) {
  const double ad2 = in.a_over_d * in.a_over_d;
  return base_angle(in) * (1.0 + ad2 * (in.xi * in.xi / std::sqrt(2.0) + 6.0 * thermal_bracket(m)));
}

/// Ensemble means: <E> = kT, <cos(psi1 - psi2)> = 0 and <cos psi> = 0.
/// `kappa` is kT / hbar omega.
inline PhaseSet thermal_mean_phases(const PhaseInputs& in, const GateGeometry& g, double kappa) {
  const double b = 2.0 * kappa;
  PhaseSet out;
  for (int alpha = 0; alpha < 2; ++alpha)
    for (int beta = 0; beta < 2; ++beta) {
      PhaseParts& p = out.parts[static_cast<std::size_t>(2 * alpha + beta)];
      p.kinetic1 = {kinetic_phases(in, alpha, 0.0, 0.0).phi1, 0.0};
      p.kinetic2 = {kinetic_phases(in, beta, 0.0, 0.0).phi1, 0.0};
      p.potential1 = potential_phase(in, g, 1, alpha);
      p.potential2 = potential_phase(in, g, 2, beta);
      const int dfac = displacement_factor(alpha, beta, g.sense);
      for (int n = 1; n <= 4; ++n) p.coulomb[static_cast<std::size_t>(n - 1)] = coulomb_phase(in, n, dfac, b);
    }
  return out;
}

/// Mean gate angle theta[1 + (a/d)^2 (xi^2/sqrt2 + 12 kT/hbar omega)].
inline double mean_gate_angle(const PhaseInputs& in, double kappa) {
  const double ad2 = in.a_over_d * in.a_over_d;
  return base_angle(in) * (1.0 + ad2 * (in.xi * in.xi / std::sqrt(2.0) + 12.0 * kappa));
}

/// Pulse duration giving base angle `theta`: tau = theta sqrt(8/pi) / (eps omega xi^2).
inline double gate_time_for_angle(double epsilon, double omega, double xi, double theta) {
  if (xi == 0.0) throw std::invalid_argument("gate_time_for_angle: xi = 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("gate_time_for_angle: eps <= 0");
  return theta * std::sqrt(8.0 / kPi) / (epsilon * omega * xi * xi);
}

/// Closed form without echo, as printed: 1 - (6 theta kappa)^2 [(a/d)^2/xi^2 - 2 (a/d)^4].
inline double fidelity_no_echo_closed(double theta, double kappa, double a_over_d, double xi) {
  const double c = 6.0 * theta * kappa;
  const double ad2 = a_over_d * a_over_d;
  return 1.0 - c * c * (ad2 / (xi * xi) - 2.0 * ad2 * ad2);
}

/// Closed form with echo: 1 - (6 theta kappa)^2 (a/d)^4.
inline double fidelity_echo_closed(double theta, double kappa, double a_over_d) {
  const double c = 6.0 * theta * kappa;
  const double ad2 = a_over_d * a_over_d;
  return 1.0 - c * c * ad2 * ad2;
}

/// kT / hbar omega.
inline double thermal_quanta(double temperature, double omega) {
  return codata::kBoltzmann * temperature / (codata::kHbar * omega);
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Runs fn(stream) for samples 0..n-1, each with its own counter-based
/// stream, and returns mean and standard error of every component. Partial
/// sums are shifted by the first sample and reduced in fixed block order,
/// so the result does not depend on the worker count.
template <std::size_t K, class Fn>
std::array<McEstimate, K> monte_carlo(std::size_t samples, std::uint64_t seed, unsigned workers,
                                      Fn&& fn) {
  if (samples == 0) throw std::invalid_argument("monte_carlo: samples must be >= 1");
  SampleStream first(seed, 0);
  const std::array<double, K> shift = fn(first);
  const std::size_t blocks = (samples + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::array<double, 2 * K>> partial(blocks);
  parallel_for(blocks, workers, [&](std::size_t b) {
    std::array<double, 2 * K> acc{};
    const std::size_t end = std::min(samples, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) {
      SampleStream rng(seed, i);
      const std::array<double, K> v = fn(rng);
      for (std::size_t k = 0; k < K; ++k) {
        const double x = v[k] - shift[k];
        acc[k] += x;
        acc[K + k] += x * x;
      }
    }
    partial[b] = acc;
  });
  std::array<double, 2 * K> tot{};
  for (const auto& p : partial)
    for (std::size_t k = 0; k < 2 * K; ++k) tot[k] += p[k];
  std::array<McEstimate, K> out;
  const double n = static_cast<double>(samples);
  for (std::size_t k = 0; k < K; ++k) {
    const double m = tot[k] / n;
    const double var = samples > 1 ? std::max(0.0, (tot[K + k] - n * m * m) / (n - 1.0)) : 0.0;
    out[k] = {shift[k] + m, std::sqrt(var / n), samples};
  }
  return out;
}

inline MotionQuanta sample_motion(SampleStream& rng, double kappa) {
  MotionQuanta m;
  m.e1 = rng.exponential(kappa);
  m.e2 = rng.exponential(kappa);
  m.psi1 = 2.0 * kPi * rng.uniform();
  m.psi2 = 2.0 * kPi * rng.uniform();
  return m;
}

struct ThermalMcResult {
  McEstimate echo_infidelity;
  McEstimate no_echo_infidelity;
  McEstimate vartheta;
};

/// Thermal Monte Carlo: per sample, the echo residual E' from the deviation
/// of vartheta from its ensemble mean and the no-echo residual from the
/// deviations of all four phases, each minimized over input states.
inline ThermalMcResult thermal_monte_carlo(const PhaseInputs& in, const GateGeometry& g,
                                           double kappa, std::size_t samples, std::uint64_t seed,
                                           unsigned workers = 1) {
  const PhaseSet mean = thermal_mean_phases(in, g, kappa);
  const DiagonalGate mean_gate = mean.gate();
  const double vt_bar = mean.vartheta();
  const auto est = monte_carlo<3>(samples, seed, workers, [&](SampleStream& rng) {
    const MotionQuanta m = sample_motion(rng, kappa);
    const DiagonalGate gate = gate_phases(in, g, m).gate();
    const double vt = gate.conditional_phase();
    const double dvt = vt - vt_bar;
    const double echo = min_state_fidelity_diag({dvt, 0.0, 0.0, dvt}).infidelity;
    std::array<double, 4> dev{};
    for (int i = 0; i < 4; ++i) dev[static_cast<std::size_t>(i)] = gate[i] - mean_gate[i];
    const double no_echo = min_state_fidelity_diag(dev).infidelity;
    return std::array<double, 3>{echo, no_echo, vt};
  });
  return {est[0], est[1], est[2]};
}

}  // namespace pushgate
