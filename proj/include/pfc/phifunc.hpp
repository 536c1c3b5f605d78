#pragma once

namespace pfc {

// Exponential-integrator weights at a = tau * Lambda >= 0:
//   phi0 = e^{-a}, phi1 = (1 - e^{-a}) / a, phi2 = (a - (1 - e^{-a})) / a^2,
// with the limits (1, 1, 1/2) at a = 0.
struct PhiEval {
  double a = 0.0;
  double phi0 = 1.0;
  double phi1 = 1.0;
  double phi2 = 0.5;
};

// Below this argument phi2 is summed from its Taylor series.
inline constexpr double kPhi2SeriesThreshold = 0.5;
// Above this argument e^{-a} underflows; the asymptotic forms are used.
inline constexpr double kPhiUnderflowThreshold = 708.0;

PhiEval phi(double a);

// phi2 / phi1, limit 1/2 at a = 0
double phi_ratio(double a);

namespace detail {
double phi2_series(double a);
double phi2_closed(double a);
} // namespace detail

} // namespace pfc
