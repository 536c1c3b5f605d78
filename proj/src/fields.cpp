#include "pfc/fields.hpp"

#include <cmath>

#include "pfc/spectral.hpp"

namespace pfc {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RealField random_field(const GridSpec &spec, std::uint64_t seed, double amplitude) {
  RealField f(spec);
  Rng rng(seed);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-amplitude, amplitude);
  return f;
}

RealField random_smooth_field(const GridSpec &spec, std::uint64_t seed, int cutoff,
                              double amplitude) {
  RealField f = lowpass(random_field(spec, seed), cutoff);
  const double m = norm_inf(f);
  if (m > 0.0) f *= amplitude / m;
  return f;
}

RealField subtract_mean(RealField f) {
  const double m = mean(f);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] -= m;
  return f;
}

RealField constant_plus_noise(const GridSpec &spec, double beta0, double delta,
                              std::uint64_t seed) {
  RealField f(spec);
  Rng rng(seed);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = beta0 + rng.uniform(-delta, delta);
  return f;
}

RealField single_mode(const GridSpec &spec, std::array<int, 3> mode, double amplitude) {
  RealField f(spec);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto c = f.coords(idx);
    // integer phase reduced mod N keeps the argument exact
    long phase = 0;
    for (int a = 0; a < spec.dim; ++a) phase += static_cast<long>(mode[a]) * c[a];
    phase %= spec.n;
    if (phase < 0) phase += spec.n;
    f[idx] = amplitude * std::cos(2.0 * M_PI * static_cast<double>(phase) / spec.n);
  }
  return f;
}

} // namespace pfc
