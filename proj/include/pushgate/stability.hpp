#pragma once

// Single-qubit phases Phi_j, their sensitivity to the force amplitude, the
// sweet-spot geometry that makes them stationary, and gate-speed limits.

#include <cmath>
#include <stdexcept>

#include "pushgate/constants.hpp"
#include "pushgate/dipole_force.hpp"
#include "pushgate/phase_engine.hpp"
#include "pushgate/trap_dynamics.hpp"

namespace pushgate {

namespace detail {

/// Sign rules for ion j: (sign of the s term, sign D^odd of the odd Coulomb
/// orders, offset in units of a).
struct IonSigns {
  double s_sign;
  double odd;
  double s;
};

inline IonSigns ion_signs(const GateGeometry& g, int ion) {
  if (ion == 1) return {1.0, 1.0, g.s};
  if (ion != 2) throw std::invalid_argument("stability: ion must be 1 or 2");
  if (g.sense == ForceSense::kOpposite) return {-1.0, 1.0, g.s_prime};
  return {1.0, -1.0, g.s_prime};
}

}  // namespace detail

/// Ensemble-mean single-qubit phase Phi_j (ion 1 or 2) including the Coulomb
/// orders up to n = 4. Equals Theta_10 - Theta_00 (ion 1) or
/// Theta_01 - Theta_00 (ion 2) of thermal_mean_phases.
inline double single_qubit_phase(const PhaseInputs& in, const GateGeometry& g, int ion,
                                 double kappa = 0.0) {
  const auto sg = detail::ion_signs(g, ion);
  const double th = base_angle(in);
  const double eps = in.epsilon;
  const double wt = in.omega_tau;
  const double xi = in.xi;
  const double ad = in.a_over_d;
  const double r2 = std::sqrt(2.0);
  return th * (-1.0 / (eps * wt * wt) + 1.0 / eps - sg.s_sign * sg.s * std::sqrt(8.0) / (xi * eps) -
               sg.odd / (ad * xi * r2) - 0.5 -
               sg.odd * ad * (xi / std::sqrt(6.0) + 6.0 * kappa / (xi * r2)) -
               ad * ad * (xi * xi / std::sqrt(8.0) + 6.0 * kappa));
}

/// dPhi_j/dxi at fixed tau. `dxi2_dxi` is the averaging factor d<xi^2>/dxi
/// in the adiabatic term; 0 selects 2 xi.
inline double dphi_dxi(const PhaseInputs& in, const GateGeometry& g, int ion, double kappa = 0.0,
                       double dxi2_dxi = 0.0) {
  const auto sg = detail::ion_signs(g, ion);
  const double c = std::sqrt(kPi / 8.0) * in.epsilon * in.omega_tau;
  const double eps = in.epsilon;
  const double wt = in.omega_tau;
  const double xi = in.xi;
  const double ad = in.a_over_d;
  const double avg = (dxi2_dxi == 0.0 ? 2.0 * xi : dxi2_dxi) * (1.0 - eps / 2.0 - 1.0 / (wt * wt));
  return c * (avg / eps - sg.s_sign * sg.s * std::sqrt(8.0) / eps - sg.odd / (ad * std::sqrt(2.0)) -
              sg.odd * ad * (3.0 * xi * xi / std::sqrt(6.0) + 6.0 * kappa / std::sqrt(2.0)) -
              ad * ad * (std::sqrt(2.0) * xi * xi * xi + 12.0 * kappa * xi));
}

/// Offsets (s, s') in units of a that null dPhi_1/dxi and dPhi_2/dxi. The
/// derivative is linear in s, so this is exact for the truncated phase.
inline GateGeometry sweet_spot(const PhaseInputs& in, ForceSense sense, double kappa = 0.0,
                               double dxi2_dxi = 0.0) {
  GateGeometry g{0.0, 0.0, sense};
  const GateGeometry at_zero = g;
  const double slope = -std::sqrt(kPi / 8.0) * in.omega_tau * std::sqrt(8.0);
  // dPhi/dxi = d0 + slope * s_sign * s, with d0 the value at s = 0.
  const double d1 = dphi_dxi(in, at_zero, 1, kappa, dxi2_dxi);
  const double d2 = dphi_dxi(in, at_zero, 2, kappa, dxi2_dxi);
  g.s = -d1 / slope;
  g.s_prime = -d2 / (slope * detail::ion_signs(at_zero, 2).s_sign);
  return g;
}

/// Offset s (m) of the linearized light-shift potential for the laser geometry.
inline double geometry_to_s(const LaserConfig& laser) {
  if (laser.mode == LaserMode::kTravelling) {
    if (laser.x0 == 0.0) throw std::domain_error("geometry_to_s: x0 = 0 is singular");
    return -laser.waist * laser.waist / (4.0 * laser.x0);
  }
  const double k = laser.k();
  const double c = std::cos(k * laser.z0);
  if (std::abs(c) < 1e-15) throw std::domain_error("geometry_to_s: cos(k z0) = 0 is singular");
  return std::tan(k * laser.z0) / (2.0 * k);
}

/// Trap frequency at which |s| = eps d / 4: (1/d) sqrt(l / (m |s|)).
inline double omega_sweet(const IonSpecies& ion, double d, double s) {
  if (s == 0.0) throw std::domain_error("omega_sweet: s = 0");
  if (!(d > 0.0)) throw std::invalid_argument("omega_sweet: d must be positive");
  return std::sqrt(coulomb_constant(ion.charge) / (ion.mass * std::abs(s))) / d;
}

struct SensitivityReport {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double dphi1 = 0.0;  // per unit xi
  double dphi2 = 0.0;
  double coefficient = 0.0;  // C = max_j |xi dPhi_j/dxi|
  double noise_infidelity = 0.0;
};

/// [C dI/I]^2 with C = max_j |dPhi_j / d ln xi|.
inline SensitivityReport intensity_noise_infidelity(const PhaseInputs& in, const GateGeometry& g,
                                                    double relative_noise, double kappa = 0.0,
                                                    double dxi2_dxi = 0.0) {
  SensitivityReport r;
  r.phi1 = single_qubit_phase(in, g, 1, kappa);
  r.phi2 = single_qubit_phase(in, g, 2, kappa);
  r.dphi1 = dphi_dxi(in, g, 1, kappa, dxi2_dxi);
  r.dphi2 = dphi_dxi(in, g, 2, kappa, dxi2_dxi);
  r.coefficient = std::abs(in.xi) * std::max(std::abs(r.dphi1), std::abs(r.dphi2));
  const double x = r.coefficient * relative_noise;
  r.noise_infidelity = x * x;
  return r;
}

/// v = omega tau l sqrt8 / (hbar sqrt(pi)), with l = q^2 / 4 pi eps0.
inline double characteristic_velocity(double omega_tau, double charge) {
  return omega_tau * coulomb_constant(charge) * std::sqrt(8.0) / (codata::kHbar * std::sqrt(kPi));
}

struct SpeedReport {
  double velocity = 0.0;        // m / s
  double a_xi_over_d = 0.0;     // sqrt(omega d / v)
  double xbar_max = 0.0;        // m, allowed push
  double omega_tau_min = 0.0;   // from the push limit
  double sequence_time = 0.0;   // 2 tau, s
  bool push_ok = true;          // omega tau >= omega_tau_min
};

/// Speed limits for a pulse of length omega tau. The push limit uses
/// (d / xbar_max)^2 omega d hbar / l, which sets the smallest omega tau
/// keeping a xi below xbar_max.
inline SpeedReport speed_constraints(const IonSpecies& ion, const TrapConfig& trap,
                                     const LaserConfig& laser, double omega_tau) {
  SpeedReport r;
  r.velocity = characteristic_velocity(omega_tau, ion.charge);
  r.a_xi_over_d = std::sqrt(trap.omega * trap.d / r.velocity);
  r.xbar_max = laser.mode == LaserMode::kTravelling ? laser.waist / 4.0 : laser.wavelength / 10.0;
  const double ratio = trap.d / r.xbar_max;
  r.omega_tau_min =
      ratio * ratio * trap.omega * trap.d * codata::kHbar / coulomb_constant(ion.charge);
  r.sequence_time = 2.0 * omega_tau / trap.omega;
  r.push_ok = omega_tau >= r.omega_tau_min;
  return r;
}

}  // namespace pushgate
