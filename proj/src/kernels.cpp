#include "pfc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pfc::kernels {

namespace {

// Neumaier compensated accumulator.
struct CompensatedSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

inline long wrap(long i, long n) { return i < 0 ? i + n : (i >= n ? i - n : i); }

template <bool Parallel>
void laplacian_impl(const Extents &e, std::span<const double> in, std::span<double> out) {
  const long n0 = e.n0();
  const long n = e.n;
  const double inv_h2 = 1.0 / (e.h * e.h);
  const double centre = 2.0 * e.dim;
  const bool three_d = e.dim == 3;
  const double *f = in.data();
  double *g = out.data();

#pragma omp parallel for collapse(2) schedule(static) if (Parallel)
  for (long i = 0; i < n0; ++i) {
    for (long j = 0; j < n; ++j) {
      const long im = wrap(i - 1, n0), ip = wrap(i + 1, n0);
      const long jm = wrap(j - 1, n), jp = wrap(j + 1, n);
      const double *row = f + (i * n + j) * n;
      const double *row_jm = f + (i * n + jm) * n;
      const double *row_jp = f + (i * n + jp) * n;
      const double *row_im = f + (im * n + j) * n;
      const double *row_ip = f + (ip * n + j) * n;
      double *dst = g + (i * n + j) * n;
      for (long k = 0; k < n; ++k) {
        const long km = k == 0 ? n - 1 : k - 1;
        const long kp = k == n - 1 ? 0 : k + 1;
        double s = (row[km] + row[kp]) + (row_jm[k] + row_jp[k]);
        if (three_d) s += row_im[k] + row_ip[k];
        dst[k] = (s - centre * row[k]) * inv_h2;
      }
    }
  }
}

// sign = +1: forward difference (f(x+e) - f(x))/h; sign = -1: backward (f(x) - f(x-e))/h
template <bool Parallel>
void diff_impl(const Extents &e, int axis, int sign, std::span<const double> in,
               std::span<double> out) {
  const int pa = e.padded_axis(axis);
  const long n0 = e.n0();
  const long n = e.n;
  const double inv_h = 1.0 / e.h;
  const double *f = in.data();
  double *g = out.data();

#pragma omp parallel for collapse(2) schedule(static) if (Parallel)
  for (long i = 0; i < n0; ++i) {
    for (long j = 0; j < n; ++j) {
      long oi = i, oj = j;
      if (pa == 0) oi = wrap(i + sign, n0);
      if (pa == 1) oj = wrap(j + sign, n);
      const double *row = f + (i * n + j) * n;
      const double *other = f + (oi * n + oj) * n;
      double *dst = g + (i * n + j) * n;
      if (pa == 2) {
        for (long k = 0; k < n; ++k) {
          const long ko = wrap(k + sign, n);
          dst[k] = sign > 0 ? (row[ko] - row[k]) * inv_h : (row[k] - row[ko]) * inv_h;
        }
      } else {
        for (long k = 0; k < n; ++k)
          dst[k] = sign > 0 ? (other[k] - row[k]) * inv_h : (row[k] - other[k]) * inv_h;
      }
    }
  }
}

template <bool Parallel>
void cube_impl(std::span<const double> in, std::span<double> out) {
  const long size = static_cast<long>(in.size());
#pragma omp parallel for schedule(static) if (Parallel)
  for (long i = 0; i < size; ++i) out[i] = in[i] * in[i] * in[i];
}

template <class Term>
double blocked_sum(std::size_t size, Term term) {
  const long blocks = static_cast<long>((size + kBlock - 1) / kBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    CompensatedSum acc;
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(size, lo + kBlock);
    for (std::size_t i = lo; i < hi; ++i) acc.add(term(i));
    partial[static_cast<std::size_t>(b)] = acc.value();
  }
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

template <class Term>
double sequential_sum(std::size_t size, Term term) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < size; ++i) acc.add(term(i));
  return acc.value();
}

} // namespace

namespace serial {
void laplacian(const Extents &e, std::span<const double> in, std::span<double> out) {
  laplacian_impl<false>(e, in, out);
}
void forward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out) {
  diff_impl<false>(e, axis, +1, in, out);
}
void backward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out) {
  diff_impl<false>(e, axis, -1, in, out);
}
void cube(std::span<const double> in, std::span<double> out) { cube_impl<false>(in, out); }
double sum(std::span<const double> a) {
  return sequential_sum(a.size(), [&](std::size_t i) { return a[i]; });
}
double dot(std::span<const double> a, std::span<const double> b) {
  return sequential_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}
double sum_pow4(std::span<const double> a) {
  return sequential_sum(a.size(), [&](std::size_t i) {
    const double s = a[i] * a[i];
    return s * s;
  });
}
double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}
} // namespace serial

namespace omp {
void laplacian(const Extents &e, std::span<const double> in, std::span<double> out) {
  laplacian_impl<true>(e, in, out);
}
void forward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out) {
  diff_impl<true>(e, axis, +1, in, out);
}
void backward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out) {
  diff_impl<true>(e, axis, -1, in, out);
}
void cube(std::span<const double> in, std::span<double> out) { cube_impl<true>(in, out); }
double sum(std::span<const double> a) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i]; });
}
double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}
double sum_pow4(std::span<const double> a) {
  return blocked_sum(a.size(), [&](std::size_t i) {
    const double s = a[i] * a[i];
    return s * s;
  });
}
double max_abs(std::span<const double> a) {
  double m = 0.0;
  const long size = static_cast<long>(a.size());
#pragma omp parallel for reduction(max : m) schedule(static)
  for (long i = 0; i < size; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}
} // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

} // namespace pfc::kernels
