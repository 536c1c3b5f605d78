#include "pfc/scheme.hpp"

#include <algorithm>
#include <cmath>

#include "pfc/kernels.hpp"
#include "pfc/phifunc.hpp"

namespace pfc {

void SchemeParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("scheme: tau must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("scheme: epsilon must lie in (0, 1)");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw Error("scheme: kappa must be >= 0");
  if (C2 && !(*C2 > 0.0)) throw Error("scheme: C2 must be positive");
  if (C3 && !(*C3 > 0.0)) throw Error("scheme: C3 must be positive");
}

KappaPolicy parse_kappa_policy(const std::string &name) {
  if (name == "fixed") return KappaPolicy::fixed;
  if (name == "lemma_adaptive") return KappaPolicy::lemma_adaptive;
  if (name == "theory") return KappaPolicy::theory;
  throw Error("unknown kappa policy '" + name + "' (fixed | lemma_adaptive | theory)");
}

std::string to_string(KappaPolicy p) {
  switch (p) {
  case KappaPolicy::fixed: return "fixed";
  case KappaPolicy::lemma_adaptive: return "lemma_adaptive";
  case KappaPolicy::theory: return "theory";
  }
  return "?";
}

NonlinearMode parse_nonlinear_mode(const std::string &name) {
  if (name == "full") return NonlinearMode::full;
  if (name == "no_cube") return NonlinearMode::no_cube;
  if (name == "linear") return NonlinearMode::linear;
  throw Error("unknown nonlinear mode '" + name + "' (full | no_cube | linear)");
}

std::string to_string(NonlinearMode m) {
  switch (m) {
  case NonlinearMode::full: return "full";
  case NonlinearMode::no_cube: return "no_cube";
  case NonlinearMode::linear: return "linear";
  }
  return "?";
}

double lemma_kappa(double max_norm, double epsilon) {
  return std::max((3.0 * max_norm * max_norm - epsilon) / 2.0, 1.0);
}

bool kappa_condition_holds(double kappa, double max_norm, double epsilon) {
  return kappa >= (3.0 * max_norm * max_norm - epsilon) / 2.0;
}

ConstantChain constants_chain(double E0, double beta0, const GridSpec &spec, double C2, double C3,
                              const SchemeParams &params) {
  if (!(C2 > 0.0) || !(C3 > 0.0)) throw Error("constants: C2 and C3 must be positive");
  if (!std::isfinite(E0) || !std::isfinite(beta0)) throw Error("constants: non-finite input");
  if (E0 + spec.volume < 0.0) throw Error("constants: E0 + |Omega| must be >= 0");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0))
    throw Error("constants: epsilon must lie in (0, 1)");

  ConstantChain c;
  c.C0t = E0;
  c.beta0 = beta0;
  c.C2 = C2;
  c.C3 = C3;
  c.volume = spec.volume;
  c.epsilon = params.epsilon;
  const double b = std::abs(beta0);

  c.C1t = 2.0 * std::sqrt(E0 + spec.volume);
  c.C2t = C2 * (b + c.C1t);
  c.C3t = 3.0 * c.C2t * c.C2t * C3 * c.C1t;
  c.C4t = std::sqrt(2.0 * c.C1t * c.C1t + 1.0);
  c.C5t = C2 * (b + c.C4t);
  c.C6t = 3.0 * c.C5t * c.C5t * C3 * c.C4t;
  const double s24 = c.C2t + c.C4t;
  c.C8t = 36.0 * c.C3t * c.C3t + 12.0 * c.C6t * c.C6t + 32.0 * C3 * C3 * c.C1t * c.C1t +
          12.0 * C3 * C3 * s24 * s24;
  c.C9t = std::sqrt(7.0 * c.C1t * c.C1t + 4.0 + 0.375 * s24 * s24);
  c.C10t = C2 * (b + c.C9t);

  c.kappa_theory = lemma_kappa(c.C10t, params.epsilon);
  c.tau_max = std::min({std::pow(c.kappa_theory, -1.5), 1.0 / (32.0 * C3 * C3),
                        1.0 / (36.0 * c.C3t * c.C3t), 1.0 / (12.0 * c.C6t * c.C6t)});
  c.tau_max_stage1 = std::min(1.0 / (16.0 * C3 * C3), 1.0 / (8.0 * c.C3t * c.C3t));
  return c;
}

Etdrk2::Etdrk2(const GridSpec &spec, const SchemeParams &params)
    : spec_(spec), params_(params), symbols_(), transform_(spec) {
  params_.validate();
  symbols_ = build_symbols(spec, params_.kappa, params_.tau);
  const std::size_t size = spec.size();
  w1_.resize(size);
  w2_.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    const PhiEval p = phi(params_.tau * symbols_.Lambda[i]);
    w1_[i] = params_.tau * p.phi1;
    w2_[i] = params_.tau * p.phi2;
  }
  cube_buf_.resize(size);
  cube_hat_.resize(size);
}

void Etdrk2::transform_with_forcing(const RealField &u, std::vector<Complex> &u_hat,
                                    std::vector<Complex> &f_hat) {
  require_same(u.spec(), spec_, "etdrk2");
  const std::size_t size = spec_.size();
  u_hat.resize(size);
  f_hat.resize(size);
  transform_.forward(u.values(), u_hat);
  const double shift = params_.epsilon + params_.kappa;
  const auto &lam = symbols_.lambda;
  switch (params_.nonlinear) {
  case NonlinearMode::linear:
    std::fill(f_hat.begin(), f_hat.end(), Complex(0.0, 0.0));
    break;
  case NonlinearMode::no_cube:
    for (std::size_t i = 0; i < size; ++i) f_hat[i] = (lam[i] * shift) * u_hat[i];
    break;
  case NonlinearMode::full:
    // Lap_h(u^3) - (eps + kappa) Lap_h u  ->  lambda ((eps + kappa) u^ - (u^3)^)
    kernels::omp::cube(u.values(), cube_buf_);
    transform_.forward(cube_buf_, cube_hat_);
    for (std::size_t i = 0; i < size; ++i)
      f_hat[i] = lam[i] * (shift * u_hat[i] - cube_hat_[i]);
    break;
  }
}

RealField Etdrk2::synthesize(const std::vector<Complex> &c) {
  RealField out(spec_);
  transform_.inverse(c, out.values());
  return out;
}

RealField Etdrk2::f_kappa(const RealField &u) {
  std::vector<Complex> u_hat, f_hat;
  transform_with_forcing(u, u_hat, f_hat);
  return synthesize(f_hat);
}

RealField Etdrk2::f_kappa_stencil(const RealField &u) const {
  require_same(u.spec(), spec_, "etdrk2");
  const double shift = params_.epsilon + params_.kappa;
  switch (params_.nonlinear) {
  case NonlinearMode::linear: return RealField(spec_);
  case NonlinearMode::no_cube: return -shift * laplacian(u);
  case NonlinearMode::full: break;
  }
  return laplacian(cube(u)) - shift * laplacian(u);
}

// Every stage is applied as an increment synthesized from DFT space and added
// to the previous field in grid space. The increment has an exactly zero mean
// mode, and a vanishing increment leaves the field bit-identical.
RealField Etdrk2::stage1(const RealField &u_n) {
  std::vector<Complex> u_hat, f_hat;
  transform_with_forcing(u_n, u_hat, f_hat);
  const auto &Lambda = symbols_.Lambda;
  for (std::size_t i = 0; i < u_hat.size(); ++i)
    u_hat[i] = w1_[i] * (f_hat[i] - Lambda[i] * u_hat[i]);
  return u_n + synthesize(u_hat);
}

RealField Etdrk2::stage2(const RealField &u_n, const RealField &u_tilde) {
  std::vector<Complex> un_hat, fn_hat, ut_hat, ft_hat;
  transform_with_forcing(u_n, un_hat, fn_hat);
  transform_with_forcing(u_tilde, ut_hat, ft_hat);
  for (std::size_t i = 0; i < ut_hat.size(); ++i) ut_hat[i] = w2_[i] * (ft_hat[i] - fn_hat[i]);
  return u_tilde + synthesize(ut_hat);
}

RealField Etdrk2::stage2_expanded(const RealField &u_n, const RealField &u_tilde) {
  std::vector<Complex> un_hat, fn_hat, ut_hat, ft_hat;
  transform_with_forcing(u_n, un_hat, fn_hat);
  transform_with_forcing(u_tilde, ut_hat, ft_hat);
  const auto &Lambda = symbols_.Lambda;
  // phi0 - 1 = -a phi1(a)
  for (std::size_t i = 0; i < un_hat.size(); ++i)
    un_hat[i] = -w1_[i] * Lambda[i] * un_hat[i] +
                ((w1_[i] - w2_[i]) * fn_hat[i] + w2_[i] * ft_hat[i]);
  return u_n + synthesize(un_hat);
}

Etdrk2::Substages Etdrk2::substage_split(const RealField &u_n) {
  std::vector<Complex> un_hat, fn_hat;
  transform_with_forcing(u_n, un_hat, fn_hat);
  const std::size_t size = un_hat.size();
  const auto &Lambda = symbols_.Lambda;

  std::vector<Complex> c(size);
  for (std::size_t i = 0; i < size; ++i) c[i] = -w1_[i] * Lambda[i] * un_hat[i];
  RealField u_star = u_n + synthesize(c);

  for (std::size_t i = 0; i < size; ++i) c[i] = w1_[i] * fn_hat[i];
  RealField u_tilde = u_star + synthesize(c);

  std::vector<Complex> ut_hat, ft_hat;
  transform_with_forcing(u_tilde, ut_hat, ft_hat);
  for (std::size_t i = 0; i < size; ++i)
    c[i] = w1_[i] * fn_hat[i] + w2_[i] * (ft_hat[i] - fn_hat[i]);
  RealField u_next = u_star + synthesize(c);
  return {std::move(u_star), std::move(u_tilde), std::move(u_next)};
}

Etdrk2::StepOutput Etdrk2::step(const RealField &u_n) {
  std::vector<Complex> un_hat, fn_hat;
  transform_with_forcing(u_n, un_hat, fn_hat);
  const auto &Lambda = symbols_.Lambda;
  std::vector<Complex> c(un_hat.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = w1_[i] * (fn_hat[i] - Lambda[i] * un_hat[i]);
  RealField u_tilde = u_n + synthesize(c);

  std::vector<Complex> ut_hat, ft_hat;
  transform_with_forcing(u_tilde, ut_hat, ft_hat);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = w2_[i] * (ft_hat[i] - fn_hat[i]);
  RealField u_next = u_tilde + synthesize(c);
  return {std::move(u_tilde), std::move(u_next)};
}

RealField f_kappa(const RealField &u, const SchemeParams &params) {
  return Etdrk2(u.spec(), params).f_kappa(u);
}

RealField stage1(const RealField &u_n, const SchemeParams &params) {
  return Etdrk2(u_n.spec(), params).stage1(u_n);
}

RealField stage2(const RealField &u_n, const RealField &u_tilde, const SchemeParams &params) {
  return Etdrk2(u_n.spec(), params).stage2(u_n, u_tilde);
}

double select_kappa(const StepState &state, const SchemeParams &params) {
  switch (params.policy) {
  case KappaPolicy::fixed: return params.kappa;
  case KappaPolicy::lemma_adaptive: return lemma_kappa(state.running_max_inf, params.epsilon);
  case KappaPolicy::theory: {
    if (!params.C2 || !params.C3) throw Error("kappa policy 'theory' requires C2 and C3");
    const ConstantChain chain =
        constants_chain(energy(state.u, params.epsilon).total, mean(state.u), state.u.spec(),
                        *params.C2, *params.C3, params);
    return chain.kappa_theory;
  }
  }
  throw Error("unknown kappa policy");
}

TraceRecord make_record(const RealField &u, long step, double tau, double epsilon, double kappa) {
  TraceRecord r;
  r.step = step;
  r.time = static_cast<double>(step) * tau;
  r.energy = energy(u, epsilon);
  r.mass = mean(u);
  r.linf = norm_inf(u);
  r.lap_norm = norm2(laplacian(u));
  r.kappa = kappa;
  r.h2_bound_ok = h2_bound(r.lap_norm, r.energy.total, u.spec().volume).holds;
  return r;
}

namespace {

Trace drive(const RealField &u0, StepState st, const SchemeParams &params, long n_steps,
            const RunHooks &hooks, bool fresh) {
  if (n_steps < 0) throw Error("run: n_steps must be >= 0");
  params.validate();
  const GridSpec spec = u0.spec();
  Trace trace;
  trace.epsilon = params.epsilon;

  for (int attempt = 0;; ++attempt) {
    trace.records.clear();
    trace.first_kappa_violation.reset();
    trace.kappa = st.kappa;
    SchemeParams p = params;
    p.kappa = st.kappa;

    if (params.policy == KappaPolicy::theory && params.C2 && params.C3) {
      const auto chain = constants_chain(energy(u0, p.epsilon).total, mean(u0), spec, *p.C2,
                                         *p.C3, p);
      if (p.tau > chain.tau_max)
        trace.warnings.push_back("tau exceeds the admissible bound tau_max = " +
                                 std::to_string(chain.tau_max));
    }

    Etdrk2 stepper(spec, p);
    if (fresh) {
      TraceRecord r0 = make_record(st.u, st.step_index, p.tau, p.epsilon, st.kappa);
      trace.records.push_back(r0);
      if (hooks.on_record) hooks.on_record(r0, st);
    }

    bool restart = false;
    double next_kappa = st.kappa;
    while (st.step_index < n_steps) {
      auto out = stepper.step(st.u);
      const long next = st.step_index + 1;
      if (!out.u_tilde.all_finite() || !out.u_next.all_finite())
        throw NonFiniteError(next, "non-finite value in the solution at step " +
                                       std::to_string(next));
      const double m0 =
          std::max({norm_inf(st.u), norm_inf(out.u_tilde), norm_inf(out.u_next)});
      st.running_max_inf = std::max(st.running_max_inf, m0);
      st.u = std::move(out.u_next);
      st.u_tilde = std::move(out.u_tilde);
      st.step_index = next;

      TraceRecord r = make_record(st.u, next, p.tau, p.epsilon, st.kappa);
      r.m0 = m0;
      r.kappa_ok = kappa_condition_holds(st.kappa, m0, p.epsilon);
      if (!r.kappa_ok) {
        if (!trace.first_kappa_violation) trace.first_kappa_violation = next;
        if (params.strict && params.policy == KappaPolicy::lemma_adaptive) {
          if (attempt < kMaxStrictRestarts) {
            next_kappa = lemma_kappa(kStrictSafetyFactor * st.running_max_inf, p.epsilon);
            restart = true;
            break;
          }
          trace.warnings.push_back("strict mode: restart budget exhausted at step " +
                                   std::to_string(next));
        }
      }
      trace.records.push_back(r);
      if (hooks.on_record) hooks.on_record(r, st);
      if (hooks.checkpoint_every > 0 && next % hooks.checkpoint_every == 0 &&
          hooks.on_checkpoint)
        hooks.on_checkpoint(st);
      if (hooks.should_stop && hooks.should_stop(st)) break;
    }
    if (!restart) return trace;

    ++trace.restarts;
    const double running = st.running_max_inf;
    st = StepState{};
    st.u = u0;
    st.running_max_inf = running;
    st.kappa = next_kappa;
    fresh = true;
    if (hooks.on_restart) hooks.on_restart(next_kappa, attempt + 1);
  }
}

} // namespace

Trace run(const RealField &u0, const SchemeParams &params, long n_steps, const RunHooks &hooks) {
  params.validate();
  if (!u0.all_finite()) throw NonFiniteError(0, "initial field contains non-finite values");
  StepState st;
  st.u = u0;
  st.running_max_inf = norm_inf(u0);
  st.kappa = select_kappa(st, params);
  return drive(u0, std::move(st), params, n_steps, hooks, true);
}

Trace resume(const RealField &u0, const StepState &start, const SchemeParams &params,
             long n_steps, const RunHooks &hooks) {
  require_same(u0.spec(), start.u.spec(), "resume");
  return drive(u0, start, params, n_steps, hooks, false);
}

} // namespace pfc
