#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfc/grid.hpp"
#include "pfc/scheme.hpp"

namespace pfc::verify {

// worst_violation is the most negative normalized slack seen (0 if none);
// passed <=> worst_violation >= -tolerance. Aggregate reports pass iff every
// claim passes.
struct CheckReport {
  std::string name;
  long trials = 0;
  double worst_violation = 0.0;
  std::uint64_t worst_input_seed = 0;
  double tolerance = 0.0;
  bool passed = true;
  std::optional<long> first_violation_step;
  std::vector<CheckReport> claims;
};

inline constexpr double kIdentityTol = 1e-12;    // summation-by-parts identities
inline constexpr double kEqualityTol = 1e-11;    // representation equalities
inline constexpr double kInequalityTol = 1e-10;  // operator estimate inequalities
inline constexpr double kNonlinearTol = 1e-12;   // ||grad f^3|| <= 3 ||f||^2 ||grad f||
inline constexpr double kDissipationSlack = 1e-11;

// a >= b: min(0, a - b) / (max(|a|, |b|) + 1)
double inequality_violation(double lhs, double rhs);
// a == b: -|a - b| / max(|a|, |b|), 0 when both vanish
double equality_violation(double a, double b);

struct SweepOptions {
  GridSpec spec;
  std::uint64_t seed = 1;
  long trials = 100;
  int cutoff = -1; // lowpass cutoff for band-limited trials; -1 -> N / 4
};

CheckReport check_sbp(const SweepOptions &opt);
CheckReport check_prop1(double kappa, double tau, const SweepOptions &opt);
CheckReport check_prop2(double kappa, double tau, const SweepOptions &opt);
CheckReport check_nonlinear_bounds(const SweepOptions &opt);

struct EmbeddingEstimate {
  double C2_emp = 0.0; // max ||f||_inf / (|mean f| + ||Lap_h f||_2)
  double C3_emp = 0.0; // max ||grad_h f||_2 / ||Lap_h f||_2
  long samples = 0;
};
EmbeddingEstimate estimate_embedding_constants(const SweepOptions &opt);

// the two ratios for a single field; nullopt for constant fields
std::optional<std::pair<double, double>> embedding_ratios(const RealField &f);

CheckReport check_dissipation(const Trace &trace);

// ||G0 grad_h Lap_h^k f||_2^2 evaluated by Parseval: L^d sum phi1 lambda^{2k+1} |f^|^2
double g0_grad_lap_power_sq(const RealField &f, const SymbolTable &symbols, int k);

// sample `trial` of a sweep: band-limited on even trials, full-spectrum noise on odd
RealField sweep_field(const SweepOptions &opt, std::uint64_t trial_seed, long trial);

std::string format_report(const CheckReport &r);

} // namespace pfc::verify
