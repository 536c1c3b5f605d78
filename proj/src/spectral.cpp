#include "pfc/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "pfc/kernels.hpp"
#include "pfc/phifunc.hpp"

namespace pfc {

struct Transform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const Transform::Plans> plans_for(const GridSpec &spec) {
  static std::map<std::pair<int, int>, std::shared_ptr<const Transform::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto key = std::make_pair(spec.dim, spec.n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const std::size_t size = spec.size();
  auto *a = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * size));
  auto *b = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * size));
  int dims[3] = {spec.n, spec.n, spec.n};
  auto plans = std::make_shared<Transform::Plans>();
  // FFTW_ESTIMATE keeps the chosen algorithm, and therefore every rounded
  // result, identical from run to run.
  plans->forward = fftw_plan_dft(spec.dim, dims, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
  plans->backward = fftw_plan_dft(spec.dim, dims, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
  if (!plans->forward || !plans->backward) throw Error("fftw: plan creation failed");
  cache.emplace(key, plans);
  return plans;
}

fftw_complex *as_fftw(Complex *p) { return reinterpret_cast<fftw_complex *>(p); }

} // namespace

Transform::Transform(const GridSpec &spec) : spec_(spec), plans_(plans_for(spec)) {
  const std::size_t size = spec.size();
  in_ = reinterpret_cast<Complex *>(fftw_malloc(sizeof(fftw_complex) * size));
  out_ = reinterpret_cast<Complex *>(fftw_malloc(sizeof(fftw_complex) * size));
  if (!in_ || !out_) throw Error("fftw: allocation failed");
}

Transform::~Transform() {
  fftw_free(in_);
  fftw_free(out_);
}

void Transform::forward(std::span<const double> real, std::span<Complex> coeffs) {
  const std::size_t size = spec_.size();
  if (real.size() != size || coeffs.size() != size) throw Error("dft: size mismatch");
  for (std::size_t i = 0; i < size; ++i) in_[i] = Complex(real[i], 0.0);
  fftw_execute_dft(plans_->forward, as_fftw(in_), as_fftw(out_));
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) coeffs[i] = out_[i] * scale;
}

double Transform::inverse(std::span<const Complex> coeffs, std::span<double> real) {
  const std::size_t size = spec_.size();
  if (real.size() != size || coeffs.size() != size) throw Error("idft: size mismatch");
  std::copy(coeffs.begin(), coeffs.end(), in_);
  fftw_execute_dft(plans_->backward, as_fftw(in_), as_fftw(out_));
  double max_imag = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    real[i] = out_[i].real();
    max_imag = std::max(max_imag, std::abs(out_[i].imag()));
  }
  return max_imag;
}

void Transform::forward_complex(std::span<const Complex> in, std::span<Complex> coeffs) {
  const std::size_t size = spec_.size();
  if (in.size() != size || coeffs.size() != size) throw Error("dft: size mismatch");
  std::copy(in.begin(), in.end(), in_);
  fftw_execute_dft(plans_->forward, as_fftw(in_), as_fftw(out_));
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) coeffs[i] = out_[i] * scale;
}

void Transform::inverse_complex(std::span<const Complex> coeffs, std::span<Complex> out) {
  const std::size_t size = spec_.size();
  if (out.size() != size || coeffs.size() != size) throw Error("idft: size mismatch");
  std::copy(coeffs.begin(), coeffs.end(), in_);
  fftw_execute_dft(plans_->backward, as_fftw(in_), as_fftw(out_));
  std::copy(out_, out_ + size, out.begin());
}

SpectralCoeffs dft(const RealField &f) {
  SpectralCoeffs c{f.spec(), std::vector<Complex>(f.size())};
  Transform t(f.spec());
  t.forward(f.values(), c.coeffs);
  return c;
}

RealField idft(const SpectralCoeffs &c) {
  if (c.coeffs.size() != c.spec.size()) throw Error("idft: coefficient count mismatch");
  RealField f(c.spec);
  Transform t(c.spec);
  t.inverse(c.coeffs, f.values());
  return f;
}

SymbolTable build_symbols(const GridSpec &spec, double kappa, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error("symbols: tau must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw Error("symbols: kappa must be >= 0");
  SymbolTable t;
  t.spec = spec;
  t.kappa = kappa;
  t.tau = tau;
  const std::size_t size = spec.size();
  t.lambda.resize(size);
  t.Lambda.resize(size);

  // 4/h^2 sin^2(m pi h / L) per axis, with h / L = 1 / N
  std::vector<double> axis(static_cast<std::size_t>(spec.n));
  const double scale = 4.0 / (spec.h * spec.h);
  for (int m = 0; m < spec.n; ++m) {
    const double s = std::sin(M_PI * signed_mode(m, spec.n) / spec.n);
    axis[static_cast<std::size_t>(m)] = scale * s * s;
  }
  RealField index_helper(spec);
  for (std::size_t idx = 0; idx < size; ++idx) {
    const auto c = index_helper.coords(idx);
    double lam = 0.0;
    for (int a = 0; a < spec.dim; ++a) lam += axis[static_cast<std::size_t>(c[a])];
    const double one_minus = 1.0 - lam;
    t.lambda[idx] = lam;
    t.Lambda[idx] = (one_minus * one_minus + kappa) * lam;
  }
  return t;
}

DiagonalOp parse_diagonal_op(std::string_view name) {
  static const std::pair<std::string_view, DiagonalOp> names[] = {
      {"exp", DiagonalOp::exp},         {"phi1", DiagonalOp::phi1},
      {"phi2", DiagonalOp::phi2},       {"G", DiagonalOp::G},
      {"G0", DiagonalOp::G0},           {"G1", DiagonalOp::G1},
      {"G2", DiagonalOp::G2},           {"G3", DiagonalOp::G3},
      {"G4", DiagonalOp::G4},           {"G5", DiagonalOp::G5},
      {"laplacian", DiagonalOp::laplacian}, {"biharmonic", DiagonalOp::biharmonic},
      {"stab_lap", DiagonalOp::stab_lap}, {"lkappa", DiagonalOp::lkappa},
      {"g_lkappa", DiagonalOp::g_lkappa},
  };
  for (const auto &[n, op] : names)
    if (n == name) return op;
  throw Error("unknown diagonal operator '" + std::string(name) + "'");
}

std::string_view to_string(DiagonalOp op) {
  switch (op) {
  case DiagonalOp::exp: return "exp";
  case DiagonalOp::phi1: return "phi1";
  case DiagonalOp::phi2: return "phi2";
  case DiagonalOp::G: return "G";
  case DiagonalOp::G0: return "G0";
  case DiagonalOp::G1: return "G1";
  case DiagonalOp::G2: return "G2";
  case DiagonalOp::G3: return "G3";
  case DiagonalOp::G4: return "G4";
  case DiagonalOp::G5: return "G5";
  case DiagonalOp::laplacian: return "laplacian";
  case DiagonalOp::biharmonic: return "biharmonic";
  case DiagonalOp::stab_lap: return "stab_lap";
  case DiagonalOp::lkappa: return "lkappa";
  case DiagonalOp::g_lkappa: return "g_lkappa";
  }
  return "?";
}

double diagonal_multiplier(DiagonalOp op, double lambda, double Lambda, double tau) {
  const double a = tau * Lambda;
  switch (op) {
  case DiagonalOp::exp: return phi(a).phi0;
  case DiagonalOp::phi1:
  case DiagonalOp::G: return phi(a).phi1;
  case DiagonalOp::phi2:
  case DiagonalOp::G1: return phi(a).phi2;
  case DiagonalOp::G2: return phi_ratio(a);
  case DiagonalOp::G0: return std::sqrt(phi(a).phi1);
  case DiagonalOp::G3: return std::sqrt(phi(a).phi2);
  case DiagonalOp::G4: return std::sqrt(phi_ratio(a));
  case DiagonalOp::G5: return std::sqrt(-std::expm1(-a) / tau) * lambda;
  case DiagonalOp::laplacian: return -lambda;
  case DiagonalOp::biharmonic: return lambda * lambda;
  case DiagonalOp::stab_lap: return (1.0 - lambda) * (1.0 - lambda);
  case DiagonalOp::lkappa: return Lambda;
  case DiagonalOp::g_lkappa: return -std::expm1(-a) / tau;
  }
  throw Error("unknown diagonal operator");
}

std::vector<double> multiplier_table(const SymbolTable &table, DiagonalOp op) {
  std::vector<double> m(table.lambda.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = diagonal_multiplier(op, table.lambda[i], table.Lambda[i], table.tau);
  return m;
}

RealField apply_multiplier(const RealField &f, std::span<const double> m) {
  const std::size_t size = f.size();
  if (m.size() != size) throw Error("apply_multiplier: multiplier size mismatch");
  Transform t(f.spec());
  std::vector<Complex> c(size);
  t.forward(f.values(), c);
  for (std::size_t i = 0; i < size; ++i) c[i] *= m[i];
  RealField out(f.spec());
  const double residue = t.inverse(c, out.values());
  const double scale = std::max(norm_inf(out), norm_inf(f));
  if (residue > 1e-12 * scale)
    throw Error("apply_multiplier: non-negligible imaginary residue " + std::to_string(residue));
  return out;
}

RealField apply_diagonal(const RealField &f, const SymbolTable &table, DiagonalOp op) {
  require_same(f.spec(), table.spec, "apply_diagonal");
  const auto m = multiplier_table(table, op);
  return apply_multiplier(f, m);
}

RealField lowpass(const RealField &f, int cutoff) {
  const GridSpec &s = f.spec();
  if (cutoff < 0 || cutoff > s.n / 2) throw Error("lowpass: cutoff out of range");
  std::vector<double> m(f.size(), 1.0);
  for (std::size_t idx = 0; idx < m.size(); ++idx) {
    const auto c = f.coords(idx);
    for (int a = 0; a < s.dim; ++a)
      if (std::abs(signed_mode(c[a], s.n)) > cutoff) m[idx] = 0.0;
  }
  return apply_multiplier(f, m);
}

double parseval_weighted(const SpectralCoeffs &c, std::span<const double> weight) {
  if (weight.size() != c.coeffs.size()) throw Error("parseval: weight size mismatch");
  std::vector<double> terms(c.coeffs.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = weight[i] * std::norm(c.coeffs[i]);
  return c.spec.volume * kernels::omp::sum(terms);
}

} // namespace pfc
