#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfc/cli.hpp"

int main(int argc, char **argv) {
  using namespace pfc::cli;
  CLI::App app{"Phase field crystal ETDRK2 solver"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto *run = app.add_subcommand("run", "run a configured simulation");
  RunControl control;
  long stop_at = -1;
  run->add_option("--config", config, "key = value configuration file")->required();
  run->add_flag("--resume", control.resume, "continue from the checkpoint in the output directory");
  auto *run_seed = run->add_option("--seed", seed, "initial-condition seed (overrides config)");
  auto *run_out = run->add_option("--out-dir", out_dir, "output directory (overrides config)");
  run->add_option("--stop-at-step", stop_at, "checkpoint and stop at this step");

  auto *ver = app.add_subcommand("verify", "run property checks");
  VerifyOptions vo;
  ver->add_option("suite", vo.suite, "sbp | prop1 | prop2 | nonlinear | embed | all");
  ver->add_option("--seed", vo.seed);
  ver->add_option("--trials", vo.trials);
  ver->add_option("--kappa", vo.kappa);
  ver->add_option("--tau", vo.tau);
  ver->add_option("--N", vo.n);
  ver->add_option("--dim", vo.dim);
  ver->add_option("--L", vo.length);

  auto *order = app.add_subcommand("order", "temporal self-convergence study");
  std::vector<double> taus;
  double tau_ref = 0.000625;
  order->add_option("--config", config, "key = value configuration file")->required();
  order->add_option("--taus", taus, "time steps, comma separated")->delimiter(',')->required();
  order->add_option("--tau-ref", tau_ref, "reference time step");
  auto *order_seed = order->add_option("--seed", seed);
  auto *order_out = order->add_option("--out-dir", out_dir);

  auto *cons = app.add_subcommand("constants", "print the a priori constants chain");
  ConstantsOptions co;
  cons->add_option("--E0", co.E0, "initial energy");
  cons->add_option("--beta0", co.beta0, "mean of the initial data");
  cons->add_option("--dim", co.dim);
  cons->add_option("--N", co.n);
  cons->add_option("--L", co.length);
  cons->add_option("--epsilon", co.epsilon);
  cons->add_option("--C2", co.C2);
  cons->add_option("--C3", co.C3);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  CommonOverrides ov;
  if (run->parsed()) {
    if (*run_seed) ov.seed = seed;
    if (*run_out) ov.out_dir = out_dir;
    if (stop_at >= 0) control.stop_at_step = stop_at;
    return cmd_run(config, ov, control, std::cout, std::cerr);
  }
  if (ver->parsed()) return cmd_verify(vo, std::cout, std::cerr);
  if (order->parsed()) {
    if (*order_seed) ov.seed = seed;
    if (*order_out) ov.out_dir = out_dir;
    return cmd_order(config, ov, taus, tau_ref, std::cout, std::cerr);
  }
  return cmd_constants(co, std::cout, std::cerr);
}
