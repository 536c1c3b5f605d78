#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "pfc/grid.hpp"

namespace pfc {

// splitmix64 mix of (seed, stream); used to give each trial its own
// generator so results do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // uniform in [lo, hi), 53-bit resolution, platform independent
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

// values uniform in [-amplitude, amplitude]
RealField random_field(const GridSpec &spec, std::uint64_t seed, double amplitude = 1.0);
// random_field passed through lowpass(cutoff), rescaled to max |value| = amplitude
RealField random_smooth_field(const GridSpec &spec, std::uint64_t seed, int cutoff,
                              double amplitude = 1.0);
RealField subtract_mean(RealField f);

// beta0 + uniform noise in [-delta, delta]
RealField constant_plus_noise(const GridSpec &spec, double beta0, double delta, std::uint64_t seed);
// amplitude * cos(2 pi k.x / L)
RealField single_mode(const GridSpec &spec, std::array<int, 3> mode, double amplitude);

} // namespace pfc
