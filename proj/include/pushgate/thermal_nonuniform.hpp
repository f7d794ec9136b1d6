#pragma once

// Echo-gate fidelity when the force amplitude depends on the ion position.
// The thermal position spread is Gaussian; the gate angle scales with the
// local xi^2, so only the moments of xi over that spread enter.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "pushgate/constants.hpp"
#include "pushgate/phase_engine.hpp"
#include "pushgate/rng.hpp"
#include "pushgate/trap_dynamics.hpp"

namespace pushgate {

/// Thermal position spread sigma = sqrt(kT / m omega^2) of one ion.
struct PositionDistribution {
  double sigma = 0.0;   // m
  double mean_n = 0.0;  // kT / hbar omega

  static PositionDistribution thermal(const IonSpecies& ion, const TrapConfig& trap,
                                      double temperature) {
    if (!(temperature >= 0.0)) throw std::invalid_argument("PositionDistribution: T < 0");
    const double n = thermal_quanta(temperature, trap.omega);
    return {ground_state_length(ion, trap) * std::sqrt(n), n};
  }

  double density(double x) const {
    if (sigma <= 0.0) throw std::domain_error("PositionDistribution: point mass has no density");
    const double u = x / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * kPi));
  }

  /// 2 sigma / w.
  double r(double waist) const { return 2.0 * sigma / waist; }
};

/// 2 x0 / w.
inline double offset_ratio(double x0, double waist) { return 2.0 * x0 / waist; }

/// xi(x) / xi0 for the travelling wave: (x0 - x)/x0 exp(-2 (x^2 - 2 x0 x)/w^2).
inline double xi_profile_travelling(double x0, double waist, double x) {
  if (x0 == 0.0) throw std::domain_error("xi_profile_travelling: x0 = 0");
  return (x0 - x) / x0 * std::exp(-2.0 * (x * x - 2.0 * x0 * x) / (waist * waist));
}

/// xi(z) / xi0 for the standing wave: sin(2k (z0 - z)) / sin(2 k z0).
inline double xi_profile_standing(double k, double z0, double z) {
  const double s = std::sin(2.0 * k * z0);
  if (s == 0.0) throw std::domain_error("xi_profile_standing: sin(2 k z0) = 0");
  return std::sin(2.0 * k * (z0 - z)) / s;
}

/// Thermal averages of xi^n for n = 2, 4, 6, 8.
struct XiMoments {
  std::array<double, 4> m{};  // xi^2, xi^4, xi^6, xi^8
  bool valid = true;          // false when a series is used outside its range

  double operator()(int n) const {
    if (n != 2 && n != 4 && n != 6 && n != 8) throw std::invalid_argument("XiMoments: n in {2,4,6,8}");
    return m[static_cast<std::size_t>(n / 2 - 1)];
  }

  static XiMoments point(double xi0) {
    const double x2 = xi0 * xi0;
    return {{x2, x2 * x2, x2 * x2 * x2, x2 * x2 * x2 * x2}, true};
  }
};

/// Series coefficients (A, B) of xi^n / xi0^n = 1 + r^2 A + r^4 B, n = 2..8.
inline std::array<double, 2> tw_series_coefficients(int n, double big_r) {
  const double r2 = big_r * big_r;
  const double r4 = r2 * r2;
  switch (n) {
    case 2:
      return {1.0 / r2 + 2.0 * r2 - 5.0, -3.0 / r2 + 19.5 - 14.0 * r2 + 2.0 * r4};
    case 4:
      return {6.0 / r2 + 8.0 * r2 - 18.0, 3.0 / r4 - 84.0 / r2 + 246.0 - 176.0 * r2 + 32.0 * r4};
    case 6:
      return {15.0 / r2 + 18.0 * r2 - 39.0,
              45.0 / r4 - 495.0 / r2 + 1147.5 - 810.0 * r2 + 162.0 * r4};
    case 8:
      return {28.0 / r2 + 32.0 * r2 - 68.0,
              210.0 / r4 - 1680.0 / r2 + 3480.0 - 2432.0 * r2 + 512.0 * r4};
    default:
      throw std::invalid_argument("tw_series_coefficients: n in {2,4,6,8}");
  }
}

/// Travelling-wave moments to order r^4, r = 2 sigma / w, R = 2 x0 / w.
/// Marked invalid above r = 0.3.
inline XiMoments xi_moments_tw(double xi0, double r, double big_r) {
  if (big_r == 0.0) throw std::domain_error("xi_moments_tw: R = 0 makes the series singular");
  if (!(r >= 0.0)) throw std::invalid_argument("xi_moments_tw: r < 0");
  XiMoments out;
  for (int n = 2; n <= 8; n += 2) {
    const auto ab = tw_series_coefficients(n, big_r);
    out.m[static_cast<std::size_t>(n / 2 - 1)] =
        std::pow(xi0, n) * (1.0 + r * r * ab[0] + r * r * r * r * ab[1]);
  }
  out.valid = r <= 0.3;
  return out;
}

/// Standing-wave moments, exact in k sigma.
inline XiMoments xi_moments_sw(double xi0, double k_sigma, double kz0) {
  const double s = std::sin(2.0 * kz0);
  if (s == 0.0) throw std::domain_error("xi_moments_sw: sin(2 k z0) = 0");
  const double q = k_sigma * k_sigma;
  auto e = [&](int j) { return std::exp(-8.0 * j * j * q) * std::cos(4.0 * j * kz0); };
  const double s2 = s * s;
  XiMoments out;
  out.m[0] = std::pow(xi0, 2) / (2.0 * s2) * (1.0 - e(1));
  out.m[1] = std::pow(xi0, 4) / (8.0 * s2 * s2) * (3.0 - 4.0 * e(1) + e(2));
  out.m[2] = std::pow(xi0, 6) / (32.0 * s2 * s2 * s2) * (10.0 - 15.0 * e(1) + 6.0 * e(2) - e(3));
  out.m[3] = std::pow(xi0, 8) / (128.0 * s2 * s2 * s2 * s2) *
             (35.0 - 56.0 * e(1) + 28.0 * e(2) - 8.0 * e(3) + e(4));
  return out;
}

/// Moments by adaptive quadrature of xi0^n g(x)^n P(x) over +-12 sigma.
/// `scale` is the length over which g varies; the range is cut into pieces
/// no longer than it so oscillating profiles are resolved.
inline XiMoments xi_moments_quadrature(const std::function<double(double)>& g, double xi0,
                                       double sigma, double scale) {
  if (sigma == 0.0) {
    XiMoments p = XiMoments::point(xi0 * g(0.0));
    return p;
  }
  if (!(sigma > 0.0 && scale > 0.0)) throw std::invalid_argument("xi_moments_quadrature: bad scale");
  const PositionDistribution dist{sigma, 0.0};
  const double lim = 12.0 * sigma;
  const int pieces = std::clamp(static_cast<int>(std::ceil(2.0 * lim / scale)), 8, 1 << 16);
  const double h = 2.0 * lim / pieces;
  XiMoments out;
  for (int n = 2; n <= 8; n += 2) {
    double acc = 0.0;
    for (int i = 0; i < pieces; ++i) {
      const double lo = -lim + i * h;
      acc += detail::integrate([&](double x) { return std::pow(g(x), n) * dist.density(x); }, lo,
                               lo + h, 1e-14, 6);
    }
    out.m[static_cast<std::size_t>(n / 2 - 1)] = std::pow(xi0, n) * acc;
  }
  return out;
}

/// Full echo fidelity to (a/d)^4 for position-dependent force; equals
/// 1 - Var(vartheta)/4 with theta = theta0 xi^2 / xi0^2.
inline double fidelity_nonuniform_full(double theta0, double xi0, const XiMoments& mom,
                                       double kappa, double a_over_d) {
  const double x2 = mom(2), x4 = mom(4), x6 = mom(6), x8 = mom(8);
  const double k12 = 12.0 * kappa;
  const double v4 = x4 - x2 * x2;
  const double c6 = x6 - x2 * x4;
  const double ad2 = a_over_d * a_over_d;
  const double r2 = std::sqrt(2.0);
  const double bracket = v4 + ad2 * (2.0 * k12 * v4 + 2.0 / r2 * c6) +
                         ad2 * ad2 *
                             (k12 * k12 * (2.0 * x4 - x2 * x2) + 2.0 / r2 * k12 * c6 +
                              0.5 * (x8 - x4 * x4));
  return 1.0 - theta0 * theta0 / (4.0 * std::pow(xi0, 4)) * bracket;
}

/// Q(y) = 12 y^4 - 64 y^2 + 89 - 34/y^2 + 1/y^4.
inline double tw_quartic(double y) {
  const double y2 = y * y;
  return 12.0 * y2 * y2 - 64.0 * y2 + 89.0 - 34.0 / y2 + 1.0 / (y2 * y2);
}

/// Leading travelling-wave terms in a/d and a/w, R = 2 x0 / w.
inline double fidelity_tw_closed(double theta0, double kappa, double a_over_d, double a_over_w,
                                 double big_r) {
  if (big_r == 0.0) throw std::domain_error("fidelity_tw_closed: R = 0");
  const double c = 6.0 * theta0 * kappa;
  const double aw2 = a_over_w * a_over_w;
  const double ad2 = a_over_d * a_over_d;
  const double off = big_r - 1.0 / big_r;
  return 1.0 - c * c * ad2 * ad2 - 2.0 * theta0 / 3.0 * c * aw2 * off * off -
         2.0 / 9.0 * c * c * aw2 * aw2 * tw_quartic(big_r);
}

/// Standing wave at k z0 = pi/4: 1 - (theta0^2/32)(1 - exp(-16 (ka)^2 kappa))^2.
inline double fidelity_sw_closed(double theta0, double ka, double kappa) {
  const double x = 1.0 - std::exp(-16.0 * ka * ka * kappa);
  return 1.0 - theta0 * theta0 / 32.0 * x * x;
}

/// Limit far outside the Lamb-Dicke regime: 1 - theta0^2 / (32 sin^4(2 k z0)).
inline double fidelity_sw_floor(double theta0, double kz0) {
  const double s = std::sin(2.0 * kz0);
  return 1.0 - theta0 * theta0 / (32.0 * s * s * s * s);
}

struct LambDicke {
  double eta = 0.0;
  double k_sigma_sq = 0.0;  // 2 eta^2 <n>
  bool in_regime = true;    // eta^2 <n> < 0.1
};

inline LambDicke lamb_dicke(double k, double a, double mean_n) {
  LambDicke r;
  r.eta = k * a / std::sqrt(2.0);
  r.k_sigma_sq = 2.0 * r.eta * r.eta * mean_n;
  r.in_regime = r.eta * r.eta * mean_n < 0.1;
  return r;
}

/// Ensemble mean of vartheta for the position-dependent force, from moments.
inline double mean_vartheta_nonuniform(double theta0, double xi0, const XiMoments& mom,
                                       double kappa, double a_over_d) {
  const double ad2 = a_over_d * a_over_d;
  return theta0 / (xi0 * xi0) * (mom(2) + ad2 * (mom(4) / std::sqrt(2.0) + 12.0 * kappa * mom(2)));
}

struct NonuniformMcResult {
  McEstimate echo_infidelity;
  McEstimate vartheta;
};

/// Monte Carlo over position, energies and phases. Each sample sets xi to
/// xi0 g(x), evaluates the gate phases and scores sin^2(dvartheta/2) about
/// `vartheta_ref`.
inline NonuniformMcResult nonuniform_monte_carlo(const PhaseInputs& in0,
                                                 const std::function<double(double)>& g,
                                                 double sigma, double kappa, double vartheta_ref,
                                                 std::size_t samples, std::uint64_t seed,
                                                 unsigned workers = 1) {
  const GateGeometry geom{};
  const auto est = monte_carlo<2>(samples, seed, workers, [&](SampleStream& rng) {
    const double x = sigma * rng.normal();
    const MotionQuanta m = sample_motion(rng, kappa);
    PhaseInputs in = in0;
    in.xi = in0.xi * g(x);
    const double vt = gate_phases(in, geom, m).vartheta();
    const double h = std::sin(0.5 * (vt - vartheta_ref));
    return std::array<double, 2>{h * h, vt};
  });
  return {est[0], est[1]};
}

}  // namespace pushgate
