#pragma once

// Optical dipole force from a far-detuned travelling or standing wave: the
// dimensionless amplitude xi, detuning choice, and photon scattering during
// the two gate pulses of the echo sequence.

#include <cmath>
#include <stdexcept>
#include <string>

#include "pushgate/constants.hpp"
#include "pushgate/phase_engine.hpp"
#include "pushgate/trap_dynamics.hpp"

namespace pushgate {

enum class LaserMode { kTravelling, kStanding };

struct LaserConfig {
  LaserMode mode = LaserMode::kTravelling;
  double power = 0.0;       // W
  double waist = 0.0;       // m
  double wavelength = 0.0;  // m
  double wavenumber = 0.0;  // rad / m; 0 means 2 pi / wavelength
  double detuning = 0.0;    // rad / s
  double x0 = 0.0;          // m, travelling-wave beam offset
  double z0 = 0.0;          // m, standing-wave node offset

  double k() const { return wavenumber > 0.0 ? wavenumber : 2.0 * kPi / wavelength; }

  void validate() const {
    if (!(power > 0.0 && waist > 0.0 && wavelength > 0.0))
      throw std::invalid_argument("LaserConfig: power, waist and wavelength must be positive");
    if (!(detuning != 0.0) || !std::isfinite(detuning))
      throw std::invalid_argument("LaserConfig: detuning must be finite and nonzero");
    if (!(wavenumber >= 0.0) || !std::isfinite(x0) || !std::isfinite(z0))
      throw std::invalid_argument("LaserConfig: invalid geometry");
  }
};

/// |Omega0|^2 = 12 Gamma P / (hbar c k^3 w^2) with k the transition wavenumber.
inline double rabi_sq(const LaserConfig& laser, const IonSpecies& ion) {
  const double k = 2.0 * kPi / ion.wavelength;
  return 12.0 * ion.linewidth * laser.power /
         (codata::kHbar * codata::kSpeedOfLight * k * k * k * laser.waist * laser.waist);
}

/// Peak intensity 2P / (pi w^2) of a Gaussian beam.
inline double peak_intensity(double power, double waist) {
  return 2.0 * power / (kPi * waist * waist);
}

/// Intensity form 6 pi Gamma I / (hbar c k^3). Equals rabi_sq at I = 2P / (pi w^2).
inline double rabi_sq_from_intensity(double intensity, const IonSpecies& ion) {
  const double k = 2.0 * kPi / ion.wavelength;
  return 6.0 * kPi * ion.linewidth * intensity / (codata::kHbar * codata::kSpeedOfLight * k * k * k);
}

/// |Omega0| <= |Delta| / 10.
inline bool weak_coupling(const LaserConfig& laser, const IonSpecies& ion) {
  return std::sqrt(rabi_sq(laser, ion)) <= std::abs(laser.detuning) / 10.0;
}

inline void require_weak_coupling(const LaserConfig& laser, const IonSpecies& ion) {
  if (!weak_coupling(laser, ion))
    throw std::domain_error("dipole force: |Omega0| exceeds |Delta|/10, outside weak coupling");
}

/// Travelling-wave amplitude at ion position x (m):
/// a (x - x0) |Omega0|^2 exp(-2 ((x - x0)/w)^2) / (omega Delta w^2).
inline double xi_travelling(const LaserConfig& laser, const IonSpecies& ion,
                            const TrapConfig& trap, double x = 0.0) {
  const double a = ground_state_length(ion, trap);
  const double u = x - laser.x0;
  const double w2 = laser.waist * laser.waist;
  return a * u * rabi_sq(laser, ion) * std::exp(-2.0 * u * u / w2) /
         (trap.omega * laser.detuning * w2);
}

/// Standing-wave amplitude at (z, x):
/// -a k |Omega0|^2 sin(2k (z - z0)) exp(-2 (x/w)^2) / (omega Delta).
inline double xi_standing(const LaserConfig& laser, const IonSpecies& ion, const TrapConfig& trap,
                          double z = 0.0, double x = 0.0) {
  const double a = ground_state_length(ion, trap);
  const double k = laser.k();
  const double w = laser.waist;
  return -a * k * rabi_sq(laser, ion) * std::sin(2.0 * k * (z - laser.z0)) *
         std::exp(-2.0 * x * x / (w * w)) / (trap.omega * laser.detuning);
}

/// Amplitude at the ion's equilibrium position. Throws outside weak coupling
/// unless `enforce` is false.
inline double xi_amplitude(const LaserConfig& laser, const IonSpecies& ion, const TrapConfig& trap,
                           bool enforce = true) {
  laser.validate();
  if (enforce) require_weak_coupling(laser, ion);
  return laser.mode == LaserMode::kTravelling ? xi_travelling(laser, ion, trap)
                                              : xi_standing(laser, ion, trap);
}

/// Detuning (positive) that yields pulse duration omega tau for base angle
/// theta0. xi scales as 1 / Delta, so this is a single division.
inline double detuning_for_omega_tau(const LaserConfig& laser, const IonSpecies& ion,
                                     const TrapConfig& trap, double omega_tau, double theta0) {
  if (!(omega_tau > 0.0 && theta0 > 0.0))
    throw std::invalid_argument("detuning_for_omega_tau: omega tau and theta0 must be positive");
  LaserConfig unit = laser;
  unit.detuning = 1.0;
  const double xi_unit = std::abs(xi_amplitude(unit, ion, trap, false));
  if (xi_unit == 0.0) throw std::domain_error("detuning_for_omega_tau: zero force gradient at the ion");
  const double eps = coulomb_parameter(ion, trap);
  const double xi = std::sqrt(theta0 * std::sqrt(8.0 / kPi) / (eps * omega_tau));
  return xi_unit / xi;
}

/// |Omega|^2 at the ion for displacement `shift` (m) from its equilibrium.
inline double rabi_sq_at(const LaserConfig& laser, const IonSpecies& ion, double shift) {
  const double r0 = rabi_sq(laser, ion);
  if (laser.mode == LaserMode::kTravelling) {
    const double u = (shift - laser.x0) / laser.waist;
    return r0 * std::exp(-2.0 * u * u);
  }
  const double sn = std::sin(laser.k() * (shift - laser.z0));
  return 4.0 * r0 * sn * sn;
}

/// Weak-coupling scattering rate Gamma |Omega|^2 / (4 Delta^2).
inline double scattering_rate(double rabi_squared, double detuning, double linewidth) {
  return linewidth * rabi_squared / (4.0 * detuning * detuning);
}

/// C_trav = (pi^5 sqrt2 / 3)(eps0 c / q^2) m^2 / lambda^3.
inline double c_travelling(const IonSpecies& ion) {
  const double l = ion.wavelength;
  return std::pow(kPi, 5) * std::sqrt(2.0) / 3.0 * codata::kEpsilon0 * codata::kSpeedOfLight /
         (ion.charge * ion.charge) * ion.mass * ion.mass / (l * l * l);
}

/// C_stan = (pi^3 sqrt2 / 12)(eps0 c / q^2) m^2 / lambda.
inline double c_standing(const IonSpecies& ion) {
  return std::pow(kPi, 3) * std::sqrt(2.0) / 12.0 * codata::kEpsilon0 * codata::kSpeedOfLight /
         (ion.charge * ion.charge) * ion.mass * ion.mass / ion.wavelength;
}

/// Closed-form photon count for two pulses at 2 theta0 = pi. The standing
/// wave is assumed to have k = 2 pi / lambda.
inline double photons_closed(const LaserConfig& laser, const IonSpecies& ion,
                             const TrapConfig& trap) {
  const double w = laser.waist;
  const double scale = trap.d * trap.d * trap.d * std::pow(trap.omega, 4) / laser.power;
  if (laser.mode == LaserMode::kTravelling) {
    if (laser.x0 == 0.0) throw std::domain_error("photons_closed: x0 = 0 gives no force");
    const double r = laser.x0 / w;
    return c_travelling(ion) * std::pow(w, 6) / (laser.x0 * laser.x0) * scale *
           std::exp(2.0 * r * r);
  }
  const double c = std::cos(2.0 * kPi / ion.wavelength * laser.z0);
  if (c == 0.0) throw std::domain_error("photons_closed: cos(k z0) = 0");
  return c_standing(ion) * w * w * scale / (c * c);
}

struct ScatteringReport {
  double peak_rate = 0.0;   // 1 / s, at the ion at rest
  double photons = 0.0;     // two pulses, ion at rest
  double photons_quadrature = 0.0;  // two pulses, ion following xbar(t)
  double fidelity = 1.0;    // exp(-photons)
  bool small = true;        // photons < 0.1
};

inline double scattering_fidelity(double photons) {
  if (!(photons >= 0.0)) throw std::invalid_argument("scattering_fidelity: N must be >= 0");
  return std::exp(-photons);
}

/// Photons scattered over the two pulses of the echo sequence with base
/// angle theta0 per pulse. The pulse length follows from xi at this
/// detuning, so the count does not depend on Delta.
inline ScatteringReport photons_scattered(const LaserConfig& laser, const IonSpecies& ion,
                                          const TrapConfig& trap, double theta0 = kPi / 2.0,
                                          bool enforce = true) {
  const double xi = xi_amplitude(laser, ion, trap, enforce);
  const double eps = coulomb_parameter(ion, trap);
  const double tau = gate_time_for_angle(eps, trap.omega, xi, theta0);
  const double a = ground_state_length(ion, trap);

  ScatteringReport r;
  r.peak_rate = scattering_rate(rabi_sq_at(laser, ion, 0.0), laser.detuning, ion.linewidth);
  r.photons = 2.0 * r.peak_rate * std::sqrt(kPi) * tau;

  // Time profile exp(-t^2/tau^2) of |Omega|^2; the pushed ion sits at a f(t).
  const ForcePulse pulse{xi, tau};
  auto rate = [&](double u) {
    const double t = u * tau;
    return std::exp(-u * u) *
           scattering_rate(rabi_sq_at(laser, ion, a * pulse.f(t)), laser.detuning, ion.linewidth);
  };
  r.photons_quadrature = 2.0 * tau * detail::integrate(rate, -kDefaultWindow, kDefaultWindow, 1e-12, 10);
  r.fidelity = scattering_fidelity(r.photons);
  r.small = r.photons < 0.1;
  return r;
}

/// Largest push a xi compared with w/4 (travelling) or lambda/10 (standing).
inline bool small_displacement(const LaserConfig& laser, double a, double xi) {
  const double limit = laser.mode == LaserMode::kTravelling ? laser.waist / 4.0
                                                            : laser.wavelength / 10.0;
  return std::abs(a * xi) <= limit;
}

inline std::string to_string(LaserMode m) {
  return m == LaserMode::kTravelling ? "travelling" : "standing";
}

}  // namespace pushgate
