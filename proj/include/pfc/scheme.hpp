#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pfc/energy.hpp"
#include "pfc/grid.hpp"
#include "pfc/spectral.hpp"

namespace pfc {

enum class KappaPolicy {
  fixed,          // user kappa, unchanged
  lemma_adaptive, // max((3 M^2 - eps) / 2, 1) from the running max norm
  theory,         // max((3 C10^2 - eps) / 2, 1) from the a priori constants chain
};

// What f_kappa contains. `linear` drops it altogether (pure e^{-tau L_kappa}
// propagation); `no_cube` keeps only -(eps + kappa) Lap_h u.
enum class NonlinearMode { full, no_cube, linear };

struct SchemeParams {
  double tau = 0.01;
  double epsilon = 0.25;
  KappaPolicy policy = KappaPolicy::fixed;
  double kappa = 1.0;
  std::optional<double> C2;
  std::optional<double> C3;
  // lemma_adaptive only: restart from u0 with an enlarged kappa whenever the
  // realized M0 violates the stability condition.
  bool strict = false;
  NonlinearMode nonlinear = NonlinearMode::full;

  void validate() const;
};

KappaPolicy parse_kappa_policy(const std::string &name);
std::string to_string(KappaPolicy p);
NonlinearMode parse_nonlinear_mode(const std::string &name);
std::string to_string(NonlinearMode m);

// max((3 m^2 - eps) / 2, 1)
double lemma_kappa(double max_norm, double epsilon);
// the stability condition kappa >= (3 m^2 - eps) / 2
bool kappa_condition_holds(double kappa, double max_norm, double epsilon);

struct ConstantChain {
  double C0t = 0, C1t = 0, C2t = 0, C3t = 0, C4t = 0, C5t = 0, C6t = 0;
  double C8t = 0, C9t = 0, C10t = 0;
  double beta0 = 0;
  double C2 = 0, C3 = 0;
  double volume = 0;
  double epsilon = 0;
  double kappa_theory = 1;
  double tau_max = 0;        // min{kappa^{-3/2}, C3^{-2}/32, C3t^{-2}/36, C6t^{-2}/12}
  double tau_max_stage1 = 0; // min{C3^{-2}/16, C3t^{-2}/8}
};

ConstantChain constants_chain(double E0, double beta0, const GridSpec &spec, double C2, double C3,
                              const SchemeParams &params);

// ETDRK2 stepper for du/dt = -L_kappa u + f_kappa(u). All diagonal operators
// act in DFT space; kappa is fixed for the lifetime of the object.
class Etdrk2 {
public:
  Etdrk2(const GridSpec &spec, const SchemeParams &params);

  const GridSpec &spec() const { return spec_; }
  const SchemeParams &params() const { return params_; }
  const SymbolTable &symbols() const { return symbols_; }

  RealField f_kappa(const RealField &u);
  RealField f_kappa_stencil(const RealField &u) const;

  // u~ = phi0 u + tau phi1 f(u)
  RealField stage1(const RealField &u_n);
  // u^{n+1} = u~ + tau phi2 (f(u~) - f(u^n))
  RealField stage2(const RealField &u_n, const RealField &u_tilde);
  // u^{n+1} = phi0 u + tau ((phi1 - phi2) f(u^n) + phi2 f(u~))
  RealField stage2_expanded(const RealField &u_n, const RealField &u_tilde);

  struct Substages {
    RealField u_star; // e^{-tau L_kappa} u^n
    RealField u_tilde;
    RealField u_next;
  };
  Substages substage_split(const RealField &u_n);

  struct StepOutput {
    RealField u_tilde;
    RealField u_next;
  };
  StepOutput step(const RealField &u_n);

private:
  // coefficients of u and of f_kappa(u)
  void transform_with_forcing(const RealField &u, std::vector<Complex> &u_hat,
                              std::vector<Complex> &f_hat);
  RealField synthesize(const std::vector<Complex> &c);

  GridSpec spec_;
  SchemeParams params_;
  SymbolTable symbols_;
  std::vector<double> w1_;    // tau phi1
  std::vector<double> w2_;    // tau phi2
  Transform transform_;
  std::vector<double> cube_buf_;
  std::vector<Complex> cube_hat_;
};

// Convenience wrappers with a throwaway stepper.
RealField f_kappa(const RealField &u, const SchemeParams &params);
RealField stage1(const RealField &u_n, const SchemeParams &params);
RealField stage2(const RealField &u_n, const RealField &u_tilde, const SchemeParams &params);

struct StepState {
  long step_index = 0;
  RealField u;
  std::optional<RealField> u_tilde;
  double running_max_inf = 0.0;
  double kappa = 1.0;
};

double select_kappa(const StepState &state, const SchemeParams &params);

struct TraceRecord {
  long step = 0;
  double time = 0.0;
  EnergyBreakdown energy;
  double mass = 0.0; // mean(u)
  double linf = 0.0;
  double lap_norm = 0.0; // ||Lap_h u||_2
  double kappa = 0.0;
  double m0 = 0.0; // max(||u^n||, ||u~||, ||u^{n+1}||) of the step producing this record
  bool kappa_ok = true;
  bool h2_bound_ok = true;
};

struct Trace {
  std::vector<TraceRecord> records;
  double kappa = 0.0;
  double epsilon = 0.0;
  int restarts = 0;
  std::optional<long> first_kappa_violation;
  std::vector<std::string> warnings;
};

class NonFiniteError : public Error {
public:
  NonFiniteError(long step, const std::string &what) : Error(what), step_(step) {}
  long step() const { return step_; }

private:
  long step_;
};

struct RunHooks {
  std::function<void(const TraceRecord &, const StepState &)> on_record;
  long checkpoint_every = 0;
  std::function<void(const StepState &)> on_checkpoint;
  // strict mode rerun from u0 with a new kappa
  std::function<void(double kappa, int attempt)> on_restart;
  // checked after each completed step; true stops the loop early
  std::function<bool(const StepState &)> should_stop;
};

inline constexpr int kMaxStrictRestarts = 8;
inline constexpr double kStrictSafetyFactor = 1.1;

TraceRecord make_record(const RealField &u, long step, double tau, double epsilon, double kappa);

Trace run(const RealField &u0, const SchemeParams &params, long n_steps,
          const RunHooks &hooks = {});
// Continues a run from a checkpointed state; u0 is needed only for strict
// mode restarts.
Trace resume(const RealField &u0, const StepState &start, const SchemeParams &params,
             long n_steps, const RunHooks &hooks = {});

} // namespace pfc
