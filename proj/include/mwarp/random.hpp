#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace mwarp {

/// Seedable generator with platform-independent variates.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std:: distributions are implementation-defined, so the
/// variate transforms are written out here:
///   uniform01: top 53 bits of one engine draw, scaled by 2^-53, in [0,1)
///   normal:    Box-Muller on two uniform01 draws, cosine branch only
/// Changing either transform changes every seeded output of the project.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    const double u1 = 1.0 - uniform01();  // (0,1], keeps log finite
    const double u2 = uniform01();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace mwarp
