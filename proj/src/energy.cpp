#include "pfc/energy.hpp"

#include <cmath>
#include <vector>

#include "pfc/kernels.hpp"
#include "pfc/spectral.hpp"

namespace pfc {

namespace {
void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("energy: epsilon must lie in (0, 1)");
}
} // namespace

EnergyBreakdown energy(const RealField &u, double epsilon) {
  check_epsilon(epsilon);
  const double dv = u.spec().cell_volume();
  const RealField lap = laplacian(u);
  EnergyBreakdown e;
  e.quartic = 0.25 * dv * kernels::omp::sum_pow4(u.values());
  e.quadratic = 0.5 * (1.0 - epsilon) * inner(u, u);
  e.gradient = -grad_norm2_squared(u);
  e.biharmonic = 0.5 * inner(lap, lap);
  e.total = ((e.quartic + e.quadratic) + e.gradient) + e.biharmonic;
  return e;
}

double energy_equivalent(const RealField &u, double epsilon) {
  check_epsilon(epsilon);
  const double dv = u.spec().cell_volume();
  const RealField shifted = u + laplacian(u);
  return 0.25 * dv * kernels::omp::sum_pow4(u.values()) - 0.5 * epsilon * inner(u, u) +
         0.5 * inner(shifted, shifted);
}

RealField chemical_potential(const RealField &u, double epsilon) {
  // kappa and tau do not enter the (1 - lambda)^2 multiplier
  const SymbolTable symbols = build_symbols(u.spec(), 0.0, 1.0);
  RealField mu = apply_diagonal(u, symbols, DiagonalOp::stab_lap);
  const RealField u3 = cube(u);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] += u3[i] - epsilon * u[i];
  return mu;
}

H2Bound h2_bound(double lap_norm, double energy_total, double volume) {
  H2Bound b;
  b.lhs = lap_norm;
  const double shifted = energy_total + volume;
  b.admissible = shifted >= 0.0;
  b.rhs = b.admissible ? 2.0 * std::sqrt(shifted) : 0.0;
  b.holds = b.admissible && b.lhs <= b.rhs + 1e-10 * b.rhs;
  return b;
}

H2Bound h2_bound(const RealField &u, double epsilon) {
  return h2_bound(norm2(laplacian(u)), energy(u, epsilon).total, u.spec().volume);
}

} // namespace pfc
