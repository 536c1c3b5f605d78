#pragma once

#include "pfc/grid.hpp"

namespace pfc {

// E_h(u) = 1/4 <u^4, 1> + (1 - eps)/2 ||u||^2 - ||grad_h u||^2 + 1/2 ||Lap_h u||^2
struct EnergyBreakdown {
  double quartic = 0.0;
  double quadratic = 0.0;
  double gradient = 0.0; // always <= 0
  double biharmonic = 0.0;
  double total = 0.0;
};

EnergyBreakdown energy(const RealField &u, double epsilon);

// 1/4 <u^4, 1> - eps/2 ||u||^2 + 1/2 ||u + Lap_h u||^2; equal to energy().total
// by summation by parts.
double energy_equivalent(const RealField &u, double epsilon);

// mu = u^3 - eps u + (I + Lap_h)^2 u
RealField chemical_potential(const RealField &u, double epsilon);

struct H2Bound {
  double lhs = 0.0; // ||Lap_h u||_2
  double rhs = 0.0; // 2 (E_h(u) + |Omega|)^{1/2}
  bool admissible = true; // E_h(u) + |Omega| >= 0
  bool holds = true;
};

H2Bound h2_bound(const RealField &u, double epsilon);
H2Bound h2_bound(double lap_norm, double energy_total, double volume);

} // namespace pfc
