#include "pfc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <utility>

#include <fmt/format.h>

#include "pfc/fields.hpp"
#include "pfc/spectral.hpp"

namespace pfc::verify {

double inequality_violation(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs)) + 1.0;
  return std::min(0.0, lhs - rhs) / scale;
}

double equality_violation(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return -std::abs(a - b) / scale;
}

namespace {

struct Claim {
  std::string name;
  double tolerance;
};

CheckReport finish(CheckReport r) {
  r.passed = r.worst_violation >= -r.tolerance;
  return r;
}

CheckReport aggregate(std::string name, long trials, std::vector<CheckReport> claims) {
  CheckReport agg;
  agg.name = std::move(name);
  agg.trials = trials;
  agg.passed = true;
  agg.tolerance = 0.0;
  for (const auto &c : claims) {
    if (c.worst_violation < agg.worst_violation) {
      agg.worst_violation = c.worst_violation;
      agg.worst_input_seed = c.worst_input_seed;
    }
    agg.tolerance = std::max(agg.tolerance, c.tolerance);
    agg.passed = agg.passed && c.passed;
  }
  agg.claims = std::move(claims);
  return agg;
}

// Runs trial_fn(trial, seed) -> one violation per claim for every trial.
// Trials are independent and run in parallel; the merge walks them in trial
// order so the report does not depend on scheduling.
CheckReport sweep(const std::string &name, const std::vector<Claim> &claims, std::uint64_t seed,
                  long trials,
                  const std::function<std::vector<double>(long, std::uint64_t)> &trial_fn) {
  if (trials < 1) throw Error(name + ": trials must be >= 1");
  std::vector<std::vector<double>> results(static_cast<std::size_t>(trials));
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(trials));
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < trials; ++t) {
    try {
      const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(t));
      seeds[static_cast<std::size_t>(t)] = s;
      results[static_cast<std::size_t>(t)] = trial_fn(t, s);
    } catch (...) {
#pragma omp critical(pfc_verify_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CheckReport> reports;
  for (const auto &c : claims) {
    CheckReport r;
    r.name = name + "." + c.name;
    r.trials = trials;
    r.tolerance = c.tolerance;
    reports.push_back(r);
  }
  for (long t = 0; t < trials; ++t) {
    const auto &v = results[static_cast<std::size_t>(t)];
    for (std::size_t c = 0; c < claims.size(); ++c) {
      if (v[c] < reports[c].worst_violation) {
        reports[c].worst_violation = v[c];
        reports[c].worst_input_seed = seeds[static_cast<std::size_t>(t)];
      }
    }
  }
  for (auto &r : reports) r = finish(r);
  return aggregate(name, trials, std::move(reports));
}

int effective_cutoff(const SweepOptions &opt) {
  return opt.cutoff >= 0 ? std::min(opt.cutoff, opt.spec.n / 2) : opt.spec.n / 4;
}

RealField lap2(const RealField &f) { return laplacian(laplacian(f)); }

} // namespace

RealField sweep_field(const SweepOptions &opt, std::uint64_t trial_seed, long trial) {
  if (trial % 2 == 0) return random_smooth_field(opt.spec, trial_seed, effective_cutoff(opt));
  return random_field(opt.spec, trial_seed);
}

double g0_grad_lap_power_sq(const RealField &f, const SymbolTable &symbols, int k) {
  require_same(f.spec(), symbols.spec, "g0_grad_lap_power_sq");
  const SpectralCoeffs c = dft(f);
  std::vector<double> w(c.coeffs.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double lam = symbols.lambda[i];
    w[i] = diagonal_multiplier(DiagonalOp::G, lam, symbols.Lambda[i], symbols.tau) *
           std::pow(lam, 2 * k + 1);
  }
  return parseval_weighted(c, w);
}

CheckReport check_sbp(const SweepOptions &opt) {
  const std::vector<Claim> claims = {
      {"div", kIdentityTol},       {"lap", kIdentityTol},     {"bilap", kIdentityTol},
      {"lap_bilap", kIdentityTol}, {"lap3_bilap", kIdentityTol},
  };
  return sweep("sbp", claims, opt.seed, opt.trials, [&](long t, std::uint64_t s) {
    const RealField psi = sweep_field(opt, derive_seed(s, 0), t);
    const RealField phi = sweep_field(opt, derive_seed(s, 1), t);
    StaggeredField vec = grad(sweep_field(opt, derive_seed(s, 2), t));
    for (int a = 0; a < opt.spec.dim; ++a)
      vec.components[a] += random_field(opt.spec, derive_seed(s, 10 + a));

    const RealField lap_psi = laplacian(psi);
    const RealField lap_phi = laplacian(phi);
    const RealField bilap_phi = laplacian(lap_phi);
    const RealField bilap_psi = laplacian(lap_psi);
    const RealField lap3_psi = laplacian(bilap_psi);
    const StaggeredField grad_psi = grad(psi);

    std::vector<double> v(5);
    v[0] = equality_violation(inner(psi, divergence(vec)), -staggered_inner(grad_psi, vec));
    v[1] = equality_violation(inner(psi, lap_phi), -staggered_inner(grad_psi, grad(phi)));
    v[2] = equality_violation(inner(psi, bilap_phi), inner(lap_psi, lap_phi));
    v[3] = equality_violation(inner(lap_psi, bilap_phi),
                              -staggered_inner(grad_psi, grad(bilap_phi)));
    v[4] = equality_violation(inner(lap3_psi, bilap_phi),
                              -staggered_inner(grad(bilap_psi), grad(bilap_phi)));
    return v;
  });
}

CheckReport check_prop1(double kappa, double tau, const SweepOptions &opt) {
  if (!(kappa >= 1.0))
    throw Error("prop1: requires kappa >= 1 (precondition of the estimate), got " +
                fmt::format("{}", kappa));
  if (!(tau > 0.0)) throw Error("prop1: tau must be positive");
  const SymbolTable sym = build_symbols(opt.spec, kappa, tau);
  const std::vector<Claim> claims = {
      {"interpolation", kInequalityTol},   {"h2_vs_g5", kInequalityTol},
      {"g5_equality", kEqualityTol},       {"g5_lower_bound", kInequalityTol},
      {"decayed_pairing", kInequalityTol}, {"g0_contraction", kInequalityTol},
      {"g3_vs_g0", kInequalityTol},        {"g3_half", kInequalityTol},
      {"g4_contraction", kInequalityTol},
  };
  return sweep("prop1", claims, opt.seed, opt.trials, [&](long t, std::uint64_t s) {
    const RealField f = subtract_mean(sweep_field(opt, s, t));
    const double a2 = g0_grad_lap_power_sq(f, sym, 1); // ||G0 grad Lap f||^2
    const double c2 = g0_grad_lap_power_sq(f, sym, 2); // ||G0 grad Lap^2 f||^2
    const RealField g0_lap = apply_diagonal(laplacian(f), sym, DiagonalOp::G0);
    const double b = norm2(g0_lap);

    const RealField lap_f = laplacian(f);
    const RealField g5f = apply_diagonal(f, sym, DiagonalOp::G5);
    const double g5sq = inner(g5f, g5f);
    const RealField gl_f = apply_diagonal(f, sym, DiagonalOp::g_lkappa);
    const double pairing = inner(gl_f, lap2(f));

    const RealField ef = apply_diagonal(f, sym, DiagonalOp::exp);
    const RealField g5_ef = apply_diagonal(ef, sym, DiagonalOp::G5);
    const double decayed_pairing = inner(gl_f, lap2(ef));

    const double nf = norm2(f);
    const double n0 = norm2(apply_diagonal(f, sym, DiagonalOp::G0));
    const double n3 = norm2(apply_diagonal(f, sym, DiagonalOp::G3));
    const double n4 = norm2(apply_diagonal(f, sym, DiagonalOp::G4));

    std::vector<double> v(9);
    v[0] = inequality_violation(std::pow(b, 2.0 / 3.0) * std::pow(c2, 1.0 / 6.0), std::sqrt(a2));
    v[1] = inequality_violation(inner(lap_f, lap_f), tau * g5sq);
    v[2] = equality_violation(pairing, g5sq);
    v[3] = inequality_violation(g5sq, 0.5 * c2 + (kappa - 1.0) * a2);
    v[4] = inequality_violation(decayed_pairing, inner(g5_ef, g5_ef));
    v[5] = inequality_violation(nf, n0);
    v[6] = inequality_violation(n0, n3);
    v[7] = inequality_violation(nf / std::sqrt(2.0), n3);
    v[8] = inequality_violation(nf, n4);
    return v;
  });
}

CheckReport check_prop2(double kappa, double tau, const SweepOptions &opt) {
  if (!(tau > 0.0)) throw Error("prop2: tau must be positive");
  if (!(kappa >= 0.0)) throw Error("prop2: kappa must be >= 0");
  const SymbolTable sym = build_symbols(opt.spec, kappa, tau);
  const std::vector<Claim> claims = {
      {"random_pair", kInequalityTol}, {"g_is_decayed_f", kInequalityTol},
      {"g_is_f", kInequalityTol},      {"f_zero", kInequalityTol},
      {"remark_half", kInequalityTol},
  };
  // tau <G_h L f, Lap^2 e f> + ||Lap (g - e f)||^2  versus  tau ||G5 g||^2
  auto sides = [&](const RealField &f, const RealField &g) {
    const RealField ef = apply_diagonal(f, sym, DiagonalOp::exp);
    const RealField gl_f = apply_diagonal(f, sym, DiagonalOp::g_lkappa);
    const RealField diff = laplacian(g - ef);
    const double lhs = tau * inner(gl_f, lap2(ef)) + inner(diff, diff);
    const RealField g5g = apply_diagonal(g, sym, DiagonalOp::G5);
    return std::make_pair(lhs, tau * inner(g5g, g5g));
  };
  return sweep("prop2", claims, opt.seed, opt.trials, [&](long t, std::uint64_t s) {
    const RealField f = sweep_field(opt, derive_seed(s, 0), t);
    const RealField g = sweep_field(opt, derive_seed(s, 1), t);
    std::vector<double> v(5);
    const auto [lhs, rhs] = sides(f, g);
    v[0] = inequality_violation(lhs, rhs);
    const auto [l1, r1] = sides(f, apply_diagonal(f, sym, DiagonalOp::exp));
    v[1] = inequality_violation(l1, r1);
    const auto [l2, r2] = sides(f, f);
    v[2] = inequality_violation(l2, r2);
    const auto [l3, r3] = sides(RealField(opt.spec), g);
    v[3] = inequality_violation(l3, r3);
    v[4] = inequality_violation(lhs, 0.5 * rhs);
    return v;
  });
}

CheckReport check_nonlinear_bounds(const SweepOptions &opt) {
  static constexpr double amplitudes[] = {0.1, 1.0, 10.0};
  const std::vector<Claim> claims = {{"grad_cube", kNonlinearTol}};
  return sweep("nonlinear", claims, opt.seed, opt.trials, [&](long t, std::uint64_t s) {
    RealField f = sweep_field(opt, s, t / 3);
    f *= amplitudes[t % 3];
    const double lhs = std::sqrt(grad_norm2_squared(cube(f)));
    const double li = norm_inf(f);
    const double rhs = 3.0 * li * li * std::sqrt(grad_norm2_squared(f));
    return std::vector<double>{inequality_violation(rhs, lhs)};
  });
}

std::optional<std::pair<double, double>> embedding_ratios(const RealField &f) {
  const double lap = norm2(laplacian(f));
  if (!(lap > 0.0)) return std::nullopt;
  const double c2 = norm_inf(f) / (std::abs(mean(f)) + lap);
  const double c3 = std::sqrt(grad_norm2_squared(f)) / lap;
  return std::make_pair(c2, c3);
}

EmbeddingEstimate estimate_embedding_constants(const SweepOptions &opt) {
  if (opt.trials < 1) throw Error("embed: trials must be >= 1");
  EmbeddingEstimate est;
  for (long t = 0; t < opt.trials; ++t) {
    const std::uint64_t s = derive_seed(opt.seed, static_cast<std::uint64_t>(t));
    RealField f = sweep_field(opt, s, t);
    Rng shift_rng(derive_seed(s, 7));
    const double shift = shift_rng.uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += shift;
    const auto r = embedding_ratios(f);
    if (!r) continue;
    est.C2_emp = std::max(est.C2_emp, r->first);
    est.C3_emp = std::max(est.C3_emp, r->second);
    ++est.samples;
  }
  if (est.samples == 0) throw Error("embed: every sampled field was constant");
  return est;
}

CheckReport check_dissipation(const Trace &trace) {
  if (trace.records.empty()) throw Error("dissipation: empty trace");
  CheckReport energy_r;
  energy_r.name = "dissipation.energy";
  energy_r.tolerance = 0.0;
  CheckReport kappa_r;
  kappa_r.name = "dissipation.kappa_condition";
  kappa_r.tolerance = 0.0;
  const long steps = static_cast<long>(trace.records.size()) - 1;
  energy_r.trials = kappa_r.trials = steps;

  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const auto &prev = trace.records[i - 1];
    const auto &cur = trace.records[i];
    const double e0 = prev.energy.total;
    const double allowed = e0 + kDissipationSlack * (1.0 + std::abs(e0));
    if (cur.energy.total > allowed) {
      const double v = -(cur.energy.total - allowed) / (1.0 + std::abs(e0));
      if (!energy_r.first_violation_step) energy_r.first_violation_step = cur.step;
      if (v < energy_r.worst_violation) {
        energy_r.worst_violation = v;
        energy_r.worst_input_seed = static_cast<std::uint64_t>(cur.step);
      }
    }
    const double needed = (3.0 * cur.m0 * cur.m0 - trace.epsilon) / 2.0;
    if (cur.kappa < needed) {
      const double v = -(needed - cur.kappa) / (1.0 + needed);
      if (!kappa_r.first_violation_step) kappa_r.first_violation_step = cur.step;
      if (v < kappa_r.worst_violation) {
        kappa_r.worst_violation = v;
        kappa_r.worst_input_seed = static_cast<std::uint64_t>(cur.step);
      }
    }
  }
  energy_r.passed = !energy_r.first_violation_step;
  kappa_r.passed = !kappa_r.first_violation_step;

  CheckReport agg = aggregate("dissipation", steps, {energy_r, kappa_r});
  if (energy_r.first_violation_step && kappa_r.first_violation_step)
    agg.first_violation_step =
        std::min(*energy_r.first_violation_step, *kappa_r.first_violation_step);
  else if (energy_r.first_violation_step)
    agg.first_violation_step = energy_r.first_violation_step;
  else
    agg.first_violation_step = kappa_r.first_violation_step;
  return agg;
}

std::string format_report(const CheckReport &r) {
  std::string line = fmt::format("check={} trials={} worst_violation={:.17g} worst_seed={} "
                                 "tolerance={:.3g} passed={}",
                                 r.name, r.trials, r.worst_violation, r.worst_input_seed,
                                 r.tolerance, r.passed ? "true" : "false");
  if (r.first_violation_step) line += fmt::format(" first_violation_step={}", *r.first_violation_step);
  return line;
}

} // namespace pfc::verify
