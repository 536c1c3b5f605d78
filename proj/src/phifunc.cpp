#include "pfc/phifunc.hpp"

#include <cmath>

#include "pfc/grid.hpp"

namespace pfc {

namespace detail {

// sum_{k>=0} (-a)^k / (k+2)!
double phi2_series(double a) {
  double term = 0.5;
  double total = 0.0;
  for (int k = 0; k < 60; ++k) {
    total += term;
    term *= -a / (k + 3);
    if (std::abs(term) < 1e-18) break;
  }
  return total;
}

double phi2_closed(double a) { return (a + std::expm1(-a)) / (a * a); }

} // namespace detail

PhiEval phi(double a) {
  if (!std::isfinite(a) || a < 0.0) throw Error("phi: argument must be finite and >= 0");
  PhiEval r;
  r.a = a;
  if (a == 0.0) return r;
  if (a > kPhiUnderflowThreshold) {
    r.phi0 = 0.0;
    r.phi1 = 1.0 / a;
    r.phi2 = (a - 1.0) / (a * a);
    return r;
  }
  r.phi0 = std::exp(-a);
  r.phi1 = -std::expm1(-a) / a;
  r.phi2 = a < kPhi2SeriesThreshold ? detail::phi2_series(a) : detail::phi2_closed(a);
  return r;
}

double phi_ratio(double a) {
  const PhiEval p = phi(a);
  return p.phi2 / p.phi1;
}

} // namespace pfc
