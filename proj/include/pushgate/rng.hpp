#pragma once

#include <cmath>
#include <cstdint>

#include "pushgate/constants.hpp"

namespace pushgate {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: sample `index` of run `seed` always sees the same
/// draws, independent of how samples are distributed over workers.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : state_(splitmix64_mix(seed ^ 0x6a09e667f3bcc909ULL) ^
               splitmix64_mix(index + 0x9e3779b97f4a7c15ULL)) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

  /// Uniform on (0, 1); never returns 0, so log(u) is finite.
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  /// Boltzmann-distributed energy with mean `mean`.
  double exponential(double mean) { return -mean * std::log(uniform()); }

 private:
  std::uint64_t state_;
};

}  // namespace pushgate
