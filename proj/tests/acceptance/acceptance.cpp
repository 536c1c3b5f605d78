// Acceptance suite: one pass/fail line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "pfc/cli.hpp"
#include "pfc/energy.hpp"
#include "pfc/fields.hpp"
#include "pfc/phifunc.hpp"
#include "pfc/spectral.hpp"
#include "pfc/verify.hpp"

namespace fs = std::filesystem;
using namespace pfc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path &work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "pfc_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::map<std::string, std::string> parse_kv(const std::string &text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string g(double x) { return fmt::format("{:.3g}", x); }

verify::SweepOptions sweep(int dim, int n, long trials, std::uint64_t seed = 1) {
  verify::SweepOptions o;
  o.spec = GridSpec::make(dim, n, 2 * M_PI);
  o.trials = trials;
  o.seed = seed;
  return o;
}

// worst violation over several reports
Outcome merge(const std::vector<verify::CheckReport> &reports) {
  Outcome out{true, {}};
  double worst = 0.0;
  std::string where;
  for (const auto &r : reports) {
    out.pass = out.pass && r.passed;
    for (const auto &c : r.claims) {
      if (!c.passed) out.detail += "failed " + c.name + "; ";
      if (c.worst_violation < worst) {
        worst = c.worst_violation;
        where = c.name;
      }
    }
  }
  out.detail += fmt::format("{} reports, worst violation {}{}", reports.size(), g(worst),
                            where.empty() ? "" : " (" + where + ")");
  return out;
}

Outcome c01_sbp() {
  return merge({verify::check_sbp(sweep(2, 16, 100)), verify::check_sbp(sweep(3, 8, 100))});
}

Outcome c02_stencil_spectral() {
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    const GridSpec s = GridSpec::make(dim, dim == 2 ? 32 : 16, 5.0 + trial);
    const SymbolTable t = build_symbols(s, 0.0, 1.0);
    const RealField f = random_field(s, derive_seed(2, trial));
    const RealField a = laplacian(f);
    const RealField b = apply_diagonal(f, t, DiagonalOp::laplacian);
    worst = std::max(worst, oracle::rel_diff(b, a));
  }
  return {worst <= 1e-12, "max relative difference " + g(worst)};
}

Outcome c03_phi() {
  std::vector<double> args = {0.0};
  const int count = 10000;
  const double lo = -10.0, hi = std::log10(708.0);
  for (int i = 0; i < count - 1; ++i)
    args.push_back(std::min(708.0, std::pow(10.0, lo + (hi - lo) * i / (count - 2))));
  double worst = 0.0;
  long nonmono = 0;
  PhiEval prev = phi(0.0);
  const bool limits = prev.phi0 == 1.0 && prev.phi1 == 1.0 && prev.phi2 == 0.5;
  for (double a : args) {
    const PhiEval p = phi(a);
    const auto r = oracle::phi(a);
    for (auto [x, ref] : {std::pair{p.phi0, r.phi0}, {p.phi1, r.phi1}, {p.phi2, r.phi2}}) {
      const double rd = static_cast<double>(ref);
      worst = std::max(worst, std::abs(x - rd) / rd);
    }
    if (p.phi0 > prev.phi0 || p.phi1 > prev.phi1 || p.phi2 > prev.phi2) ++nonmono;
    prev = p;
  }
  return {worst <= 1e-14 && limits && nonmono == 0,
          fmt::format("{} arguments, max relative error {}, exact limits at 0: {}, "
                      "monotonicity violations {}",
                      args.size(), g(worst), limits ? "yes" : "no", nonmono)};
}

Outcome c04_prop1() {
  std::vector<verify::CheckReport> reps;
  for (double kappa : {1.0, 2.0, 10.0})
    for (double tau : {1e-3, 1e-1, 1.0}) reps.push_back(verify::check_prop1(kappa, tau, sweep(2, 16, 200)));
  return merge(reps);
}

Outcome c05_prop2() {
  std::vector<verify::CheckReport> reps;
  for (double kappa : {0.0, 1.0, 5.0})
    for (double tau : {1e-3, 1.0}) reps.push_back(verify::check_prop2(kappa, tau, sweep(2, 16, 200)));
  return merge(reps);
}

Outcome c06_nonlinear() { return merge({verify::check_nonlinear_bounds(sweep(2, 16, 500))}); }

Outcome c07_energy_forms() {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    const GridSpec s = GridSpec::make(dim, dim == 2 ? 16 : 8, 4.0 + 0.1 * trial);
    const std::uint64_t seed = derive_seed(7, trial);
    const RealField u = trial % 4 < 2 ? random_smooth_field(s, seed, s.n / 4, 1.5)
                                      : random_field(s, seed, 1.5);
    const double a = energy(u, 0.25).total;
    const double b = energy_equivalent(u, 0.25);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
  }
  return {worst <= 1e-12, "max relative difference " + g(worst)};
}

Outcome c08_variational() {
  const GridSpec s = GridSpec::make(2, 16, 2.0);
  const double eps = 0.25;
  RealField u = random_smooth_field(s, 31, 3, 0.5);
  RealField v = random_smooth_field(s, 32, 3, 3.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] += 0.4;
    v[i] += 1.0;
  }
  const double exact = inner(chemical_potential(u, eps), v);
  auto err = [&](double step) {
    const double fd =
        (energy(u + step * v, eps).total - energy(u - step * v, eps).total) / (2 * step);
    return std::abs(fd - exact);
  };
  const double e3 = err(1e-3), e4 = err(1e-4);
  const double ratio = e3 / e4;
  return {std::abs(ratio - 100.0) <= 10.0,
          fmt::format("<mu,v> = {}, error(1e-3) = {}, error(1e-4) = {}, ratio {}", g(exact),
                      g(e3), g(e4), g(ratio))};
}

const char *kLongRunConfig = R"(dim = 2
N = 64
L = 32
epsilon = 0.25
tau = 0.01
n_steps = 10000
kappa_policy = lemma_adaptive
strict = true
ic = constant_noise
beta0 = 0.07
delta = 0.01
seed = 1
checkpoint_every = 1000
)";

struct LongRun {
  cli::RunResult result;
  fs::path dir;
  fs::path config;
  double seconds = 0.0;
};

const LongRun &long_run() {
  static const LongRun run = [] {
    LongRun r;
    r.config = work_dir() / "long.cfg";
    std::ofstream(r.config) << kLongRunConfig;
    r.dir = work_dir() / "long_full";
    io::RunConfig cfg = io::load_run_config(r.config);
    cfg.out_dir = r.dir;
    const auto t0 = std::chrono::steady_clock::now();
    r.result = cli::run_simulation(cfg, {});
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return run;
}

Outcome c09_mass() {
  const auto &recs = long_run().result.trace.records;
  const double m0 = recs.front().mass;
  double drift = 0.0;
  for (const auto &r : recs) drift = std::max(drift, std::abs(r.mass - m0) / std::abs(m0));
  return {recs.size() == 10001 && drift <= 1e-13,
          fmt::format("{} records, max relative mass drift {} (run took {} s)", recs.size(),
                      g(drift), g(long_run().seconds))};
}

Outcome c10_dissipation() {
  const Trace &tr = long_run().result.trace;
  const verify::CheckReport rep = verify::check_dissipation(tr);
  long h2_fail = 0;
  for (const auto &r : tr.records) h2_fail += r.h2_bound_ok ? 0 : 1;
  double max_m0 = 0.0;
  for (const auto &r : tr.records) max_m0 = std::max(max_m0, r.m0);
  std::string detail = fmt::format("kappa {}, max M0 {}, strict restarts {}, H2 bound failures {}",
                                   g(tr.kappa), g(max_m0), tr.restarts, h2_fail);
  for (const auto &c : rep.claims)
    detail += fmt::format("; {} {}", c.name, c.passed ? "ok" : "first violation at step " +
                                                               std::to_string(*c.first_violation_step));
  return {rep.passed && h2_fail == 0 && tr.records.size() == 10001, detail};
}

Outcome c11_order() {
  const fs::path cfg = work_dir() / "order.cfg";
  std::ofstream(cfg) << "dim = 2\nN = 64\nL = 32\nepsilon = 0.25\nfinal_time = 1\n"
                        "kappa_policy = lemma_adaptive\nic = constant_noise\nbeta0 = 0.07\n"
                        "delta = 0.5\nseed = 3\nic_lowpass = 8\n";
  cli::CommonOverrides ov;
  ov.out_dir = work_dir() / "order";
  std::ostringstream out, err;
  const int rc = cli::cmd_order(cfg, ov, {0.02, 0.01, 0.005}, 0.000625, out, err);
  const auto kv = parse_kv(out.str());
  if (!kv.count("order_l2")) return {false, "no order reported: " + err.str()};
  const double o2 = std::stod(kv.at("order_l2")), oi = std::stod(kv.at("order_linf"));
  return {rc == 0 && std::abs(o2 - 2.0) <= 0.1 && std::abs(oi - 2.0) <= 0.1,
          fmt::format("observed order l2 {}, linf {}, exit {}", g(o2), g(oi), rc)};
}

Outcome c12_constants() {
  cli::ConstantsOptions o;
  o.E0 = 0.0;
  o.beta0 = 0.0;
  o.length = 1.0;
  o.C2 = 1.0;
  o.C3 = 1.0;
  std::ostringstream out, err;
  if (cli::cmd_constants(o, out, err) != 0) return {false, err.str()};
  auto kv = parse_kv(out.str());
  const bool hand = kv["volume"] == "1" && kv["C1t"] == "2" && kv["C2t"] == "2" &&
                    kv["C3t"] == "24" && kv["C4t"] == "3";
  Rng rng(12);
  long bad = 0;
  for (int i = 0; i < 100; ++i) {
    cli::ConstantsOptions r;
    r.dim = i % 2 == 0 ? 2 : 3;
    r.length = rng.uniform(0.5, 10.0);
    const double vol = std::pow(r.length, r.dim);
    r.E0 = rng.uniform(-vol, 10.0 * vol);
    r.beta0 = rng.uniform(-1.0, 1.0);
    r.epsilon = rng.uniform(0.01, 0.99);
    r.C2 = rng.uniform(0.01, 5.0);
    r.C3 = rng.uniform(0.01, 5.0);
    std::ostringstream o2;
    if (cli::cmd_constants(r, o2, err) != 0) {
      ++bad;
      continue;
    }
    auto m = parse_kv(o2.str());
    const double c2 = std::stod(m["C2t"]), c5 = std::stod(m["C5t"]), c10 = std::stod(m["C10t"]);
    if (!(c10 >= c5 && c5 >= c2)) ++bad;
  }
  return {hand && bad == 0,
          fmt::format("hand values C1t={} C2t={} C3t={} C4t={}; ordering failures {} of 100",
                      kv["C1t"], kv["C2t"], kv["C3t"], kv["C4t"], bad)};
}

Outcome c13_resume() {
  const LongRun &full = long_run();
  const fs::path dir = work_dir() / "long_resumed";
  cli::CommonOverrides ov;
  ov.out_dir = dir;
  std::ostringstream out, err;
  cli::RunControl stop;
  stop.stop_at_step = 5000;
  const auto t0 = std::chrono::steady_clock::now();
  const int rc1 = cli::cmd_run(full.config, ov, stop, out, err);
  const bool stopped_early = !fs::exists(dir / cli::kFinalSnapshot);
  cli::RunControl cont;
  cont.resume = true;
  const int rc2 = cli::cmd_run(full.config, ov, cont, out, err);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool csv_same = slurp(full.dir / cli::kTraceFile) == slurp(dir / cli::kTraceFile);
  const bool snap_same = slurp(full.dir / cli::kFinalSnapshot) == slurp(dir / cli::kFinalSnapshot);
  return {rc1 == 0 && rc2 == 0 && stopped_early && csv_same && snap_same,
          fmt::format("interrupted at 5000 then resumed ({} s): CSV {}, final snapshot {}", g(secs),
                      csv_same ? "identical" : "DIFFERENT", snap_same ? "identical" : "DIFFERENT")};
}

struct Criterion {
  int id;
  const char *title;
  double limit_seconds;
  std::function<Outcome()> fn;
};

} // namespace

int main(int argc, char **argv) {
  const std::vector<Criterion> criteria = {
      {1, "summation-by-parts identities", 5, c01_sbp},
      {2, "stencil/spectral Laplacian equivalence", 2, c02_stencil_spectral},
      {3, "phi-function accuracy, limits, monotonicity", 1, c03_phi},
      {4, "G-operator estimates (prop1)", 30, c04_prop1},
      {5, "two-field decay estimate (prop2)", 30, c05_prop2},
      {6, "nonlinear gradient bound", 5, c06_nonlinear},
      {7, "energy-form equivalence", 2, c07_energy_forms},
      {8, "variational consistency of mu", 2, c08_variational},
      {9, "mass conservation over 1e4 steps", 300, c09_mass},
      {10, "energy dissipation and stability condition", 300, c10_dissipation},
      {11, "temporal order 2", 600, c11_order},
      {12, "constants chain", 1, c12_constants},
      {13, "deterministic resume", 600, c13_resume},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto &c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::cout << fmt::format("[{}] {:2d} {}: {} [{:.2f} s, limit {} s{}]\n", pass ? "PASS" : "FAIL",
                             c.id, c.title, o.detail, secs, c.limit_seconds,
                             in_time ? "" : ", TOO SLOW");
    std::cout.flush();
  }
  fs::remove_all(work_dir());
  std::cout << (failed == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failed))
            << '\n';
  return failed == 0 ? 0 : 1;
}
