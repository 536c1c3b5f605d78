#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pfc/io.hpp"
#include "pfc/scheme.hpp"

namespace pfc::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1; // a check or study did not pass
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNonFinite = 3;

// Files written by `run` inside the output directory.
inline constexpr const char *kTraceFile = "trace.csv";
inline constexpr const char *kFinalSnapshot = "final.pfc";
inline constexpr const char *kCheckpointSnapshot = "checkpoint.pfc";
inline constexpr const char *kCheckpointMeta = "checkpoint.meta";

struct RunControl {
  bool resume = false;
  std::optional<long> stop_at_step; // checkpoint and stop once this step is reached
};

struct RunResult {
  Trace trace; // records produced by this invocation only
  RealField final_u;
  long final_step = 0;
  bool completed = false;
};

// Executes a configured run, writing CSV, snapshots and checkpoints under
// cfg.out_dir.
RunResult run_simulation(const io::RunConfig &cfg, const RunControl &control);

struct CommonOverrides {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
};

io::RunConfig load_config(const std::filesystem::path &path, const CommonOverrides &ov);

int cmd_run(const std::filesystem::path &config, const CommonOverrides &ov,
            const RunControl &control, std::ostream &out, std::ostream &err);

struct VerifyOptions {
  std::string suite = "all";
  std::uint64_t seed = 1;
  long trials = 100;
  double kappa = 2.0;
  double tau = 0.1;
  int n = 16;
  int dim = 2;
  double length = 6.283185307179586;
};

int cmd_verify(const VerifyOptions &opt, std::ostream &out, std::ostream &err);

struct OrderRow {
  double tau = 0.0;
  long steps = 0;
  double err_l2 = 0.0;
  double err_linf = 0.0;
};

struct OrderResult {
  std::vector<OrderRow> rows;
  double tau_ref = 0.0;
  double kappa = 0.0;
  double order_l2 = 0.0;
  double order_linf = 0.0;
  bool exact = false; // every error at the roundoff floor
  bool passed = false;
};

inline constexpr double kOrderThreshold = 1.9;

OrderResult order_study(const io::RunConfig &cfg, const std::vector<double> &taus,
                        double tau_ref);
int cmd_order(const std::filesystem::path &config, const CommonOverrides &ov,
              const std::vector<double> &taus, double tau_ref, std::ostream &out,
              std::ostream &err);

struct ConstantsOptions {
  double E0 = 0.0;
  double beta0 = 0.0;
  int dim = 2;
  int n = 16;
  double length = 1.0;
  double epsilon = 0.25;
  double C2 = 1.0;
  double C3 = 1.0;
};

int cmd_constants(const ConstantsOptions &opt, std::ostream &out, std::ostream &err);

// least-squares slope of log(err) against log(tau)
double fitted_order(const std::vector<double> &taus, const std::vector<double> &errors);

} // namespace pfc::cli
