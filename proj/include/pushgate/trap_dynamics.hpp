#pragma once

// Trap and ion parameters, and the semiclassical motion of one ion in its
// microtrap under a Gaussian pushing pulse. Interfaces are SI; the motion is
// integrated in units of a = sqrt(hbar / m omega) and 1 / omega.

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pushgate/constants.hpp"

namespace pushgate {

struct IonSpecies {
  double mass = 0.0;        // kg
  double charge = 0.0;      // C
  double wavelength = 0.0;  // m, reference transition
  double linewidth = 0.0;   // rad / s

  void validate() const {
    if (!(mass > 0.0 && charge > 0.0 && wavelength > 0.0 && linewidth > 0.0))
      throw std::invalid_argument("IonSpecies: all fields must be positive");
  }

  /// 40Ca+ on the 397 nm line. The linewidth puts the Doppler limit
  /// hbar Gamma / 2 at 538 uK.
  static IonSpecies calcium40() {
    return {40.0 * codata::kAtomicMassUnit, codata::kElementaryCharge, 397e-9,
            2.0 * kPi * 22.4e6};
  }
};

struct TrapConfig {
  double omega = 0.0;  // rad / s
  double d = 0.0;      // m

  void validate() const {
    if (!(omega > 0.0 && d > 0.0))
      throw std::invalid_argument("TrapConfig: omega and d must be positive");
  }
};

/// Thermal oscillation of both ions before the gate.
struct MotionState {
  double e1 = 0.0;  // J
  double e2 = 0.0;  // J
  double psi1 = 0.0;
  double psi2 = 0.0;
};

/// f(t) = xi exp(-(t / tau)^2); the force is hbar omega f(t) / a.
struct ForcePulse {
  double xi = 0.0;
  double tau = 0.0;  // s

  double f(double t) const { return xi * std::exp(-(t / tau) * (t / tau)); }
  double fdot(double t) const { return -2.0 * t / (tau * tau) * f(t); }
};

/// Default integration half-window in units of tau.
inline constexpr double kDefaultWindow = 6.0;

inline double ground_state_length(const IonSpecies& ion, const TrapConfig& trap) {
  return std::sqrt(codata::kHbar / (ion.mass * trap.omega));
}

/// eps = q^2 / (pi eps0 m omega^2 d^3).
inline double coulomb_parameter(const IonSpecies& ion, const TrapConfig& trap) {
  return ion.charge * ion.charge /
         (kPi * codata::kEpsilon0 * ion.mass * trap.omega * trap.omega * trap.d * trap.d * trap.d);
}

/// Increase of the ion separation from Coulomb repulsion. Solves
/// y (1 + y)^2 = eps / 2 for y = stretch / d in closed form.
inline double equilibrium_stretch(double d, double eps) {
  if (eps < 0.0) throw std::invalid_argument("equilibrium_stretch: eps < 0");
  if (eps == 0.0) return 0.0;
  const double eta = 27.0 * eps / 4.0;
  const double sh = std::sinh(std::log(eta + 1.0 + std::sqrt(eta * (eta + 2.0))) / 6.0);
  return 4.0 * d / 3.0 * sh * sh;
}

/// (longitudinal, transverse) frequency factors (sqrt(1 + eps), sqrt(1 - eps/2)).
inline std::pair<double, double> frequency_correction(double eps) {
  if (eps >= 2.0) throw std::domain_error("frequency_correction: eps >= 2 destabilizes transverse motion");
  return {std::sqrt(1.0 + eps), std::sqrt(1.0 - 0.5 * eps)};
}

/// Free oscillation Delta(t) = sqrt(2E / m omega^2) cos(omega t + psi).
inline double free_oscillation(const IonSpecies& ion, const TrapConfig& trap, double energy,
                               double psi, double t) {
  return std::sqrt(2.0 * energy / (ion.mass * trap.omega * trap.omega)) *
         std::cos(trap.omega * t + psi);
}

namespace detail {

/// Dimensionless pulse profile in s = omega t.
struct ScaledPulse {
  double xi;
  double wt;  // omega tau
  double f(double s) const { return xi * std::exp(-(s / wt) * (s / wt)); }
  double df(double s) const { return -2.0 * s / (wt * wt) * f(s); }
};

/// Adaptive Gauss-Kronrod. Where the integrand is ~0 a relative tolerance
/// cannot be met, so callers with long flat tails pass a small `depth`.
template <class F>
double integrate(F&& fn, double lo, double hi, double tol, unsigned depth = 20) {
  if (hi == lo) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, lo, hi, depth, tol, &err);
}

}  // namespace detail

/// Sloshing displacement delta(t) = int_{t0}^{t} xbar'(t') cos(omega (t - t')) dt'
/// with xbar = a f and t0 = -window tau, in metres.
inline double sloshing(const IonSpecies& ion, const TrapConfig& trap, const ForcePulse& pulse,
                       double t, double window = kDefaultWindow) {
  const double a = ground_state_length(ion, trap);
  const detail::ScaledPulse p{pulse.xi, trap.omega * pulse.tau};
  const double s = trap.omega * t;
  const double s0 = -window * p.wt;
  // Split cos(s - s') so both integrands are independent of s.
  const double c = detail::integrate([&](double u) { return p.df(u) * std::cos(u); }, s0, s, 1e-14);
  const double sn = detail::integrate([&](double u) { return p.df(u) * std::sin(u); }, s0, s, 1e-14);
  return a * (std::cos(s) * c + std::sin(s) * sn);
}

/// x(t) = xbar(t) - delta(t) + Delta(t) for one ion with free-motion energy
/// `energy` and phase `psi`.
inline double analytic_trajectory(const IonSpecies& ion, const TrapConfig& trap,
                                  const ForcePulse& pulse, double energy, double psi, double t,
                                  double window = kDefaultWindow) {
  const double a = ground_state_length(ion, trap);
  return a * pulse.f(t) - sloshing(ion, trap, pulse, t, window) +
         free_oscillation(ion, trap, energy, psi, t);
}

struct TrajectorySample {
  double t = 0.0;  // s
  double x = 0.0;  // m
  double v = 0.0;  // m / s
};

/// Adaptive Dormand-Prince integration of x'' + omega^2 x = F(t) / m from
/// t0 = -window tau, starting on the free orbit (energy, psi). `tol` bounds
/// the local error in units of a. Times must be >= t0 and increasing.
inline std::vector<TrajectorySample> ode_trajectory(const IonSpecies& ion, const TrapConfig& trap,
                                                    const ForcePulse& pulse, double energy,
                                                    double psi, const std::vector<double>& times,
                                                    double tol = 1e-13,
                                                    double window = kDefaultWindow) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  if (!(tol > 0.0)) throw std::invalid_argument("ode_trajectory: tol must be positive");

  const double a = ground_state_length(ion, trap);
  const detail::ScaledPulse p{pulse.xi, trap.omega * pulse.tau};
  const double amp = std::sqrt(2.0 * energy / (codata::kHbar * trap.omega));
  const double s0 = -window * p.wt;

  auto rhs = [&p](const State& y, State& dy, double s) {
    dy[0] = y[1];
    dy[1] = -y[0] + p.f(s);
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());

  State y{p.f(s0) + amp * std::cos(s0 + psi), -amp * std::sin(s0 + psi)};
  double s = s0;
  double ds = 1e-2;
  std::vector<TrajectorySample> out;
  out.reserve(times.size());
  for (double t : times) {
    const double target = trap.omega * t;
    if (target < s - 1e-12 * std::max(1.0, std::abs(s)))
      throw std::invalid_argument("ode_trajectory: times must be increasing and >= t0");
    const double snap = 1e-13 * std::max(1.0, std::abs(target));
    while (target - s > snap) {
      const bool clamped = target - s < ds;
      double h = clamped ? target - s : ds;
      if (stepper.try_step(rhs, y, s, h) == odeint::success) {
        // h now holds the suggested next step; a clamped step says nothing
        // about the natural step size.
        if (!clamped) ds = h;
      } else {
        ds = h;
        if (ds < 1e-14 * std::max(1.0, std::abs(s)))
          throw std::runtime_error("ode_trajectory: step-size underflow");
      }
    }
    s = target;
    out.push_back({t, a * y[0], a * trap.omega * y[1]});
  }
  return out;
}

/// |int f'(t) e^{i omega t} dt| / f_max over +-window tau.
inline double adiabaticity_metric(const ForcePulse& pulse, double omega,
                                  double window = kDefaultWindow) {
  const detail::ScaledPulse p{pulse.xi, omega * pulse.tau};
  const double lim = window * p.wt;
  const double re = detail::integrate([&](double u) { return p.df(u) * std::cos(u); }, -lim, lim, 1e-14);
  const double im = detail::integrate([&](double u) { return p.df(u) * std::sin(u); }, -lim, lim, 1e-14);
  return std::hypot(re, im) / std::abs(pulse.xi);
}

/// Full-line Gaussian value sqrt(pi) omega tau exp(-(omega tau / 2)^2). The
/// exponential factor alone is the usual adiabaticity estimate.
inline double adiabaticity_metric_gaussian(double omega_tau) {
  return std::sqrt(kPi) * omega_tau * std::exp(-0.25 * omega_tau * omega_tau);
}

}  // namespace pushgate
