#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfc {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Uniform periodic grid on (0, L)^dim with N points per axis.
struct GridSpec {
  int dim = 2;
  int n = 0;
  double length = 0.0;
  double h = 0.0;      // L / N
  double volume = 0.0; // L^dim

  static GridSpec make(int dim, int n, double length);

  std::size_t size() const;       // N^dim
  double cell_volume() const;     // h^dim
  std::size_t stride(int axis) const;

  bool operator==(const GridSpec &o) const {
    return dim == o.dim && n == o.n && length == o.length;
  }
};

void require_same(const GridSpec &a, const GridSpec &b, const char *what);

// Periodic grid function. Storage is row-major with the last axis fastest:
// flat index = ((i * N) + j) * N + k in 3-D, i * N + j in 2-D, where i runs
// along x.
class RealField {
public:
  RealField() = default;
  explicit RealField(const GridSpec &spec, double value = 0.0);
  RealField(const GridSpec &spec, std::vector<double> values);

  const GridSpec &spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double *data() { return values_.data(); }
  const double *data() const { return values_.data(); }

  double &operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }

  // Wrapping access, any integer indices.
  double at(std::array<long, 3> idx) const;
  std::size_t flat_index(std::array<long, 3> idx) const;
  std::array<int, 3> coords(std::size_t flat) const;

  RealField &operator+=(const RealField &o);
  RealField &operator-=(const RealField &o);
  RealField &operator*=(double s);

  bool all_finite() const;

private:
  GridSpec spec_{};
  std::vector<double> values_;
};

RealField operator+(RealField a, const RealField &b);
RealField operator-(RealField a, const RealField &b);
RealField operator*(double s, RealField a);

// Face-centred vector field: component a lives at a half offset along axis a.
// components[a][idx] is the value at (x_idx + h/2 e_a).
struct StaggeredField {
  GridSpec spec{};
  std::vector<RealField> components;

  explicit StaggeredField(const GridSpec &s);
  StaggeredField() = default;
};

struct Norms {
  double l2 = 0.0;
  double linf = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

// grid-function algebra from the periodic finite-difference calculus
double mean(const RealField &f);
double inner(const RealField &f, const RealField &g);
double norm2(const RealField &f);
double norm_inf(const RealField &f);
Norms norms(const RealField &f);

StaggeredField grad(const RealField &f);
RealField divergence(const StaggeredField &v);
RealField laplacian(const RealField &f);
double staggered_inner(const StaggeredField &a, const StaggeredField &b);
double grad_norm2_squared(const RealField &f);

RealField cube(const RealField &f);

} // namespace pfc
