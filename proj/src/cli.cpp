#include "pfc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "pfc/verify.hpp"

namespace pfc::cli {

namespace fs = std::filesystem;
using io::format_double;

io::RunConfig load_config(const fs::path &path, const CommonOverrides &ov) {
  io::RunConfig cfg = io::load_run_config(path);
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  if (ov.seed) cfg.seed = *ov.seed;
  return cfg;
}

namespace {

struct Checkpoint {
  long step = 0;
  double kappa = 0.0;
  double running_max = 0.0;
};

double parse_hexfloat(const io::KeyValueConfig &kv, const std::string &key) {
  const std::string s = kv.get_string(key);
  char *end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) kv.fail(key, "bad value '" + s + "'");
  return v;
}

Checkpoint read_checkpoint_meta(const fs::path &path) {
  const auto kv = io::KeyValueConfig::load(path);
  Checkpoint c;
  c.step = kv.get_long("step");
  c.kappa = parse_hexfloat(kv, "kappa");
  c.running_max = parse_hexfloat(kv, "running_max");
  kv.reject_unknown();
  return c;
}

void write_checkpoint(const fs::path &dir, const StepState &st, const SchemeParams &p) {
  io::write_snapshot(dir / kCheckpointSnapshot, st.u, p.epsilon, p.tau, st.step_index);
  io::write_file_atomic(dir / kCheckpointMeta,
                        fmt::format("step = {}\nkappa = {:a}\nrunning_max = {:a}\n",
                                    st.step_index, st.kappa, st.running_max_inf));
}

// Keeps the header and every row up to and including `step`.
void truncate_trace(const fs::path &path, long step) {
  std::ifstream in(path);
  if (!in) throw Error("resume: cannot read " + path.string());
  std::string line, kept;
  if (!std::getline(in, line) || line != io::kCsvHeader)
    throw Error("resume: " + path.string() + " has an unexpected header");
  kept = line + "\n";
  bool found = false;
  while (std::getline(in, line)) {
    const long row_step = std::strtol(line.c_str(), nullptr, 10);
    if (row_step > step) break;
    kept += line + "\n";
    found = found || row_step == step;
  }
  if (!found)
    throw Error(fmt::format("resume: {} has no row for checkpoint step {}", path.string(), step));
  in.close();
  io::write_file_atomic(path, kept);
}

void check_compatible(const io::SnapshotHeader &h, const io::RunConfig &cfg) {
  if (h.dim != cfg.dim || h.n != cfg.n || h.length != cfg.length ||
      h.epsilon != cfg.params.epsilon || h.tau != cfg.params.tau)
    throw Error("resume: checkpoint does not match the configuration (dim, N, L, epsilon, tau)");
}

} // namespace

RunResult run_simulation(const io::RunConfig &cfg, const RunControl &control) {
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  const fs::path csv_path = dir / kTraceFile;
  const SchemeParams &p = cfg.params;
  const RealField u0 = initial_field(cfg);

  std::optional<StepState> start;
  if (control.resume) {
    const Checkpoint meta = read_checkpoint_meta(dir / kCheckpointMeta);
    io::Snapshot snap = io::read_snapshot(dir / kCheckpointSnapshot);
    check_compatible(snap.header, cfg);
    if (snap.header.step != meta.step)
      throw Error("resume: checkpoint snapshot and metadata disagree on the step");
    if (meta.step > cfg.n_steps) throw Error("resume: checkpoint lies beyond n_steps");
    truncate_trace(csv_path, meta.step);
    StepState st;
    st.step_index = meta.step;
    st.u = std::move(snap.field);
    st.kappa = meta.kappa;
    st.running_max_inf = meta.running_max;
    start = std::move(st);
  }

  std::ofstream csv;
  auto open_csv = [&](bool append) {
    if (csv.is_open()) csv.close();
    csv.open(csv_path, append ? std::ios::app : std::ios::trunc);
    if (!csv) throw Error("cannot write " + csv_path.string());
    if (!append) csv << io::kCsvHeader << '\n';
  };
  open_csv(control.resume);

  RunResult result;
  result.final_u = start ? start->u : u0;
  result.final_step = start ? start->step_index : 0;

  RunHooks hooks;
  hooks.on_record = [&](const TraceRecord &r, const StepState &st) {
    csv << io::csv_row(r) << '\n';
    if (cfg.snapshot_every > 0 && r.step % cfg.snapshot_every == 0)
      io::write_snapshot(dir / fmt::format("snapshot_{:08d}.pfc", r.step), st.u, p.epsilon, p.tau,
                         r.step);
    if (r.step == cfg.n_steps) {
      result.final_u = st.u;
      result.final_step = r.step;
    }
  };
  hooks.checkpoint_every = cfg.checkpoint_every;
  hooks.on_checkpoint = [&](const StepState &st) {
    csv.flush();
    write_checkpoint(dir, st, p);
  };
  hooks.on_restart = [&](double, int) { open_csv(false); };
  bool stopped = false;
  if (control.stop_at_step) {
    const long stop = *control.stop_at_step;
    hooks.should_stop = [&, stop](const StepState &st) {
      if (st.step_index < stop || st.step_index >= cfg.n_steps) return false;
      csv.flush();
      write_checkpoint(dir, st, p);
      result.final_u = st.u;
      result.final_step = st.step_index;
      stopped = true;
      return true;
    };
  }

  result.trace = start ? resume(u0, *start, p, cfg.n_steps, hooks) : run(u0, p, cfg.n_steps, hooks);
  csv.close();
  if (!csv) throw Error("write failed for " + csv_path.string());
  result.completed = !stopped;
  if (result.completed)
    io::write_snapshot(dir / kFinalSnapshot, result.final_u, p.epsilon, p.tau, result.final_step);
  return result;
}

int cmd_run(const fs::path &config, const CommonOverrides &ov, const RunControl &control,
            std::ostream &out, std::ostream &err) {
  io::RunConfig cfg;
  try {
    cfg = load_config(config, ov);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const RunResult r = run_simulation(cfg, control);
    for (const auto &w : r.trace.warnings) err << "warning: " << w << '\n';
    if (r.trace.first_kappa_violation)
      err << "warning: kappa condition first violated at step " << *r.trace.first_kappa_violation
          << '\n';
    out << "status=" << (r.completed ? "completed" : "stopped") << '\n';
    out << "step=" << r.final_step << '\n';
    out << "kappa=" << format_double(r.trace.kappa) << '\n';
    out << "restarts=" << r.trace.restarts << '\n';
    if (!r.trace.records.empty()) {
      const auto &last = r.trace.records.back();
      out << "energy=" << format_double(last.energy.total) << '\n';
      out << "mass=" << format_double(last.mass) << '\n';
    }
    out << "csv=" << (cfg.out_dir / kTraceFile).string() << '\n';
    return kExitOk;
  } catch (const NonFiniteError &e) {
    err << "error: " << e.what() << " (aborted)\n";
    return kExitNonFinite;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
}

namespace {

void print_report(const verify::CheckReport &r, std::ostream &out) {
  for (const auto &c : r.claims) out << verify::format_report(c) << '\n';
  out << verify::format_report(r) << '\n';
}

} // namespace

int cmd_verify(const VerifyOptions &opt, std::ostream &out, std::ostream &err) {
  static const std::vector<std::string> suites = {"sbp", "prop1", "prop2", "nonlinear", "embed"};
  const bool all = opt.suite == "all";
  if (!all && std::find(suites.begin(), suites.end(), opt.suite) == suites.end()) {
    err << "usage: unknown suite '" << opt.suite << "' (sbp | prop1 | prop2 | nonlinear | embed | all)\n";
    return kExitUsage;
  }
  verify::SweepOptions so;
  try {
    so.spec = GridSpec::make(opt.dim, opt.n, opt.length);
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  so.seed = opt.seed;
  so.trials = opt.trials;
  if (so.trials < 1) {
    err << "error: trials must be >= 1\n";
    return kExitUsage;
  }
  if ((all || opt.suite == "prop1") && !(opt.kappa >= 1.0)) {
    err << "error: prop1 refused: the estimates require kappa >= 1 (got "
        << format_double(opt.kappa) << ")\n";
    return kExitUsage;
  }

  bool passed = true;
  try {
    for (const auto &s : suites) {
      if (!all && s != opt.suite) continue;
      if (s == "embed") {
        const auto est = verify::estimate_embedding_constants(so);
        out << fmt::format("check=embed dim={} N={} samples={} C2_emp={} C3_emp={}\n", opt.dim,
                           opt.n, est.samples, format_double(est.C2_emp),
                           format_double(est.C3_emp));
        continue;
      }
      verify::CheckReport r;
      if (s == "sbp") r = verify::check_sbp(so);
      if (s == "prop1") r = verify::check_prop1(opt.kappa, opt.tau, so);
      if (s == "prop2") r = verify::check_prop2(opt.kappa, opt.tau, so);
      if (s == "nonlinear") r = verify::check_nonlinear_bounds(so);
      print_report(r, out);
      passed = passed && r.passed;
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return passed ? kExitOk : kExitFailed;
}

double fitted_order(const std::vector<double> &taus, const std::vector<double> &errors) {
  if (taus.size() != errors.size() || taus.size() < 2)
    throw Error("order: need at least two (tau, error) points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double x = std::log(taus[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

long steps_for(double final_time, double tau) {
  const double ratio = final_time / tau;
  const double r = std::round(ratio);
  if (r < 1.0 || std::abs(ratio - r) > 1e-9 * r)
    throw Error(fmt::format("order: final time {} is not an integer multiple of tau = {}",
                            format_double(final_time), format_double(tau)));
  return static_cast<long>(r);
}

RealField integrate(const RealField &u0, const SchemeParams &p, long steps) {
  RealField last = u0;
  RunHooks hooks;
  hooks.on_record = [&](const TraceRecord &r, const StepState &st) {
    if (r.step == steps) last = st.u;
  };
  run(u0, p, steps, hooks);
  return last;
}

// Round trip through a snapshot so comparability is checked from the header.
RealField checked_roundtrip(const fs::path &path, const RealField &u, const SchemeParams &p,
                            long steps, double final_time) {
  io::write_snapshot(path, u, p.epsilon, p.tau, steps);
  io::Snapshot s = io::read_snapshot(path);
  if (!(s.field.spec() == u.spec()) || s.header.epsilon != p.epsilon ||
      std::abs(s.header.time - final_time) > 1e-12 * final_time)
    throw Error("order: snapshot " + path.string() + " is not comparable");
  return std::move(s.field);
}

} // namespace

OrderResult order_study(const io::RunConfig &cfg, const std::vector<double> &taus,
                        double tau_ref) {
  if (taus.size() < 2) throw Error("order: need at least two time steps");
  const double smallest = *std::min_element(taus.begin(), taus.end());
  if (!(tau_ref > 0.0) || tau_ref * 8.0 > smallest * (1.0 + 1e-12))
    throw Error("order: reference tau must be at least 8x smaller than the smallest tau");
  for (double t : taus)
    if (!(t > 0.0)) throw Error("order: every tau must be positive");

  const RealField u0 = initial_field(cfg);
  SchemeParams base = cfg.params;
  StepState s0;
  s0.u = u0;
  s0.running_max_inf = norm_inf(u0);
  OrderResult res;
  res.tau_ref = tau_ref;
  res.kappa = select_kappa(s0, base);
  base.kappa = res.kappa;
  base.policy = KappaPolicy::fixed;
  base.strict = false;

  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);
  SchemeParams pref = base;
  pref.tau = tau_ref;
  const long ref_steps = steps_for(cfg.final_time, tau_ref);
  const RealField ref = checked_roundtrip(dir / "order_ref.pfc", integrate(u0, pref, ref_steps),
                                          pref, ref_steps, cfg.final_time);

  std::vector<double> e2, einf;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    SchemeParams p = base;
    p.tau = taus[i];
    const long steps = steps_for(cfg.final_time, p.tau);
    const RealField u = checked_roundtrip(dir / fmt::format("order_tau_{}.pfc", i),
                                          integrate(u0, p, steps), p, steps, cfg.final_time);
    const RealField diff = u - ref;
    res.rows.push_back({p.tau, steps, norm2(diff), norm_inf(diff)});
    e2.push_back(res.rows.back().err_l2);
    einf.push_back(res.rows.back().err_linf);
  }

  const double floor = 1e-11 * std::max(norm2(ref), norm2(u0));
  res.exact = *std::max_element(e2.begin(), e2.end()) <= floor;
  if (res.exact) {
    res.passed = true;
    return res;
  }
  if (*std::min_element(e2.begin(), e2.end()) <= 0.0 ||
      *std::min_element(einf.begin(), einf.end()) <= 0.0)
    throw Error("order: zero error for a nonzero step, cannot fit an order");
  res.order_l2 = fitted_order(taus, e2);
  res.order_linf = fitted_order(taus, einf);
  res.passed = res.order_l2 >= kOrderThreshold;
  return res;
}

int cmd_order(const fs::path &config, const CommonOverrides &ov, const std::vector<double> &taus,
              double tau_ref, std::ostream &out, std::ostream &err) {
  if (taus.size() < 2) {
    err << "usage: order needs at least two time steps (--taus a,b,...)\n";
    return kExitUsage;
  }
  try {
    const io::RunConfig cfg = load_config(config, ov);
    const OrderResult r = order_study(cfg, taus, tau_ref);
    out << "tau_ref=" << format_double(r.tau_ref) << '\n';
    out << "kappa=" << format_double(r.kappa) << '\n';
    for (const auto &row : r.rows)
      out << fmt::format("tau={} steps={} err_l2={} err_linf={}\n", format_double(row.tau),
                         row.steps, format_double(row.err_l2), format_double(row.err_linf));
    if (r.exact) {
      out << "order=exact\n";
    } else {
      out << "order_l2=" << format_double(r.order_l2) << '\n';
      out << "order_linf=" << format_double(r.order_linf) << '\n';
    }
    out << "passed=" << (r.passed ? "true" : "false") << '\n';
    return r.passed ? kExitOk : kExitFailed;
  } catch (const NonFiniteError &e) {
    err << "error: " << e.what() << '\n';
    return kExitNonFinite;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_constants(const ConstantsOptions &opt, std::ostream &out, std::ostream &err) {
  try {
    const GridSpec spec = GridSpec::make(opt.dim, opt.n, opt.length);
    SchemeParams p;
    p.epsilon = opt.epsilon;
    const ConstantChain c = constants_chain(opt.E0, opt.beta0, spec, opt.C2, opt.C3, p);
    const std::pair<const char *, double> lines[] = {
        {"volume", c.volume},
        {"epsilon", c.epsilon},
        {"beta0", c.beta0},
        {"C2", c.C2},
        {"C3", c.C3},
        {"C0t", c.C0t},
        {"C1t", c.C1t},
        {"C2t", c.C2t},
        {"C3t", c.C3t},
        {"C4t", c.C4t},
        {"C5t", c.C5t},
        {"C6t", c.C6t},
        {"C8t", c.C8t},
        {"C9t", c.C9t},
        {"C10t", c.C10t},
        {"kappa_theory", c.kappa_theory},
        {"tau_max", c.tau_max},
        {"tau_max_stage1", c.tau_max_stage1},
    };
    for (const auto &[k, v] : lines) out << k << '=' << format_double(v) << '\n';
    return kExitOk;
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

} // namespace pfc::cli
