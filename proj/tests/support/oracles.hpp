#pragma once

// Slow, independent reference computations for the tests. Nothing here calls
// into the spectral or scheme modules.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pfc/grid.hpp"

namespace oracle {

using ld = long double;
using cld = std::complex<long double>;
using big = boost::multiprecision::cpp_bin_float_50;

inline std::array<int, 3> coords(const pfc::GridSpec &s, std::size_t flat) {
  std::array<int, 3> c{0, 0, 0};
  for (int a = s.dim - 1; a >= 0; --a) {
    c[a] = static_cast<int>(flat % s.n);
    flat /= s.n;
  }
  return c;
}

inline int signed_mode(int m, int n) { return 2 * m <= n ? m : m - n; }

// c_k = N^{-d} sum_x f(x) e^{-2 pi i k.x / N}
inline std::vector<cld> dft(const pfc::GridSpec &s, const std::vector<ld> &f) {
  const std::size_t size = s.size();
  const ld two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::vector<cld> out(size);
  for (std::size_t k = 0; k < size; ++k) {
    const auto kc = coords(s, k);
    cld acc = 0;
    for (std::size_t x = 0; x < size; ++x) {
      const auto xc = coords(s, x);
      long phase = 0;
      for (int a = 0; a < s.dim; ++a) phase += static_cast<long>(kc[a]) * xc[a];
      phase %= s.n;
      const ld ang = -two_pi * static_cast<ld>(phase) / s.n;
      acc += f[x] * cld(std::cos(ang), std::sin(ang));
    }
    out[k] = acc / static_cast<ld>(size);
  }
  return out;
}

inline std::vector<ld> idft_real(const pfc::GridSpec &s, const std::vector<cld> &c) {
  const std::size_t size = s.size();
  const ld two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::vector<ld> out(size);
  for (std::size_t x = 0; x < size; ++x) {
    const auto xc = coords(s, x);
    cld acc = 0;
    for (std::size_t k = 0; k < size; ++k) {
      const auto kc = coords(s, k);
      long phase = 0;
      for (int a = 0; a < s.dim; ++a) phase += static_cast<long>(kc[a]) * xc[a];
      phase %= s.n;
      const ld ang = two_pi * static_cast<ld>(phase) / s.n;
      acc += c[k] * cld(std::cos(ang), std::sin(ang));
    }
    out[x] = acc.real();
  }
  return out;
}

// eigenvalue of -Lap_h on mode k: (4 / h^2) sum_a sin^2(pi k_a / N)
inline ld lambda(const pfc::GridSpec &s, std::size_t flat) {
  const auto kc = coords(s, flat);
  const ld pi = 3.14159265358979323846264338327950288L;
  const ld h = static_cast<ld>(s.length) / s.n;
  ld acc = 0;
  for (int a = 0; a < s.dim; ++a) {
    const ld v = std::sin(pi * kc[a] / s.n);
    acc += v * v;
  }
  return 4.0L * acc / (h * h);
}

// periodic 5/7-point Laplacian in long double
inline std::vector<ld> laplacian(const pfc::GridSpec &s, const std::vector<ld> &f) {
  const ld h = static_cast<ld>(s.length) / s.n;
  std::vector<ld> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    const auto c = coords(s, x);
    ld acc = -2.0L * s.dim * f[x];
    for (int a = 0; a < s.dim; ++a) {
      for (int d : {-1, 1}) {
        auto nb = c;
        nb[a] = (nb[a] + d + s.n) % s.n;
        std::size_t idx = 0;
        for (int b = 0; b < s.dim; ++b) idx = idx * s.n + nb[b];
        acc += f[idx];
      }
    }
    out[x] = acc / (h * h);
  }
  return out;
}

struct Phi {
  big phi0, phi1, phi2;
};

// 50-digit evaluation of the phi functions; plain closed forms are fine at
// this precision except extremely close to 0, where the series is used.
inline Phi phi(double a_in) {
  const big a = a_in;
  Phi p;
  if (a_in == 0.0) {
    p.phi0 = 1;
    p.phi1 = 1;
    p.phi2 = big(1) / 2;
    return p;
  }
  p.phi0 = exp(-a);
  if (a_in < 1e-6) {
    // sum (-a)^k / (k+1)!, (-a)^k / (k+2)!
    big t1 = 1, t2 = big(1) / 2, s1 = 0, s2 = 0;
    for (int k = 0; k < 40; ++k) {
      s1 += t1;
      s2 += t2;
      t1 *= -a / (k + 2);
      t2 *= -a / (k + 3);
    }
    p.phi1 = s1;
    p.phi2 = s2;
    return p;
  }
  p.phi1 = (1 - p.phi0) / a;
  p.phi2 = (a - (1 - p.phi0)) / (a * a);
  return p;
}

inline ld to_ld(const big &b) { return static_cast<ld>(b); }

// One ETDRK2 step in long double with naive transforms; the forcing is built
// from the stencil Laplacian so it does not share the symbol path.
struct StepResult {
  std::vector<ld> u_tilde, u_next;
};

inline std::vector<ld> forcing(const pfc::GridSpec &s, const std::vector<ld> &u, ld eps,
                               ld kappa) {
  std::vector<ld> cube(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) cube[i] = u[i] * u[i] * u[i];
  const auto lc = laplacian(s, cube);
  const auto lu = laplacian(s, u);
  std::vector<ld> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = lc[i] - (eps + kappa) * lu[i];
  return f;
}

inline StepResult etdrk2_step(const pfc::GridSpec &s, const std::vector<ld> &u, double eps,
                              double kappa, double tau) {
  const std::size_t size = s.size();
  std::vector<ld> p0(size), p1(size), p2(size);
  for (std::size_t k = 0; k < size; ++k) {
    const ld lam = lambda(s, k);
    const ld Lam = ((1.0L - lam) * (1.0L - lam) + kappa) * lam;
    const Phi ph = phi(static_cast<double>(tau * Lam));
    p0[k] = to_ld(ph.phi0);
    p1[k] = to_ld(ph.phi1);
    p2[k] = to_ld(ph.phi2);
  }
  const auto uh = dft(s, u);
  const auto fh = dft(s, forcing(s, u, eps, kappa));
  std::vector<cld> th(size);
  for (std::size_t k = 0; k < size; ++k) th[k] = p0[k] * uh[k] + static_cast<ld>(tau) * p1[k] * fh[k];
  StepResult r;
  r.u_tilde = idft_real(s, th);
  const auto fth = dft(s, forcing(s, r.u_tilde, eps, kappa));
  std::vector<cld> nh(size);
  for (std::size_t k = 0; k < size; ++k)
    nh[k] = th[k] + static_cast<ld>(tau) * p2[k] * (fth[k] - fh[k]);
  r.u_next = idft_real(s, nh);
  return r;
}

inline std::vector<ld> widen(const pfc::RealField &f) {
  return std::vector<ld>(f.values().begin(), f.values().end());
}

// max |a - b| / max |b|
inline double rel_diff(const pfc::RealField &a, const std::vector<ld> &b) {
  ld num = 0, den = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    num = std::max(num, std::abs(static_cast<ld>(a[i]) - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return static_cast<double>(den > 0 ? num / den : num);
}

inline double rel_diff(const pfc::RealField &a, const pfc::RealField &b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0 ? num / den : num;
}

} // namespace oracle
