#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops. `serial` is the reference implementation kept
// for testing and benchmarking; `omp` is what the library uses.
//
// Pointwise kernels (stencils, cube) evaluate the same expression per point
// in both variants, so they agree bit for bit. Reductions differ: the serial
// reference is one sequential compensated sum, the OpenMP variant sums fixed
// blocks of kBlock entries (compensated) and combines the block partials in
// block order. The blocked result does not depend on the thread count.
namespace pfc::kernels {

inline constexpr std::size_t kBlock = 2048;

// Periodic grid shape padded to 3 axes; for dim == 2 axis 0 has extent 1.
struct Extents {
  int dim = 2;
  int n = 0;
  double h = 1.0;

  int n0() const { return dim == 3 ? n : 1; }
  std::size_t size() const {
    return static_cast<std::size_t>(n0()) * static_cast<std::size_t>(n) *
           static_cast<std::size_t>(n);
  }
  // grid axis a in [0, dim) -> padded axis in [0, 3)
  int padded_axis(int a) const { return 3 - dim + a; }
};

namespace serial {
void laplacian(const Extents &e, std::span<const double> in, std::span<double> out);
// out = (in(x + e_a) - in(x)) / h, the forward difference at x + h/2 e_a
void forward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out);
// out = (in(x) - in(x - e_a)) / h, the difference of a staggered component back to nodes
void backward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out);
void cube(std::span<const double> in, std::span<double> out);
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double sum_pow4(std::span<const double> a);
double max_abs(std::span<const double> a);
} // namespace serial

namespace omp {
void laplacian(const Extents &e, std::span<const double> in, std::span<double> out);
void forward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out);
void backward_diff(const Extents &e, int axis, std::span<const double> in, std::span<double> out);
void cube(std::span<const double> in, std::span<double> out);
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double sum_pow4(std::span<const double> a);
double max_abs(std::span<const double> a);
} // namespace omp

int max_threads();

} // namespace pfc::kernels
