#pragma once

#include <numbers>

namespace pushgate {

inline constexpr double kPi = std::numbers::pi;

// CODATA 2018, SI units.
namespace codata {
inline constexpr double kHbar = 1.054571817e-34;             // J s
inline constexpr double kBoltzmann = 1.380649e-23;           // J / K
inline constexpr double kElementaryCharge = 1.602176634e-19; // C
inline constexpr double kEpsilon0 = 8.8541878128e-12;        // F / m
inline constexpr double kSpeedOfLight = 299792458.0;         // m / s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27; // kg
inline constexpr double kFineStructure = 7.2973525693e-3;
}  // namespace codata

/// Coulomb coupling constant l = q^2 / (4 pi eps0), in J m.
constexpr double coulomb_constant(double charge) {
  return charge * charge / (4.0 * kPi * codata::kEpsilon0);
}

}  // namespace pushgate
