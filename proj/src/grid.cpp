#include "pfc/grid.hpp"

#include <cmath>
#include <string>

#include "pfc/kernels.hpp"

namespace pfc {

namespace {

kernels::Extents extents(const GridSpec &s) { return {s.dim, s.n, s.h}; }

long wrap_index(long i, long n) {
  const long r = i % n;
  return r < 0 ? r + n : r;
}

} // namespace

GridSpec GridSpec::make(int dim, int n, double length) {
  if (dim != 2 && dim != 3)
    throw Error("grid: dim must be 2 or 3, got " + std::to_string(dim));
  if (n < 4) throw Error("grid: N must be at least 4, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error("grid: L must be positive and finite");
  GridSpec s;
  s.dim = dim;
  s.n = n;
  s.length = length;
  s.h = length / n;
  s.volume = std::pow(length, dim);
  return s;
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  return total;
}

double GridSpec::cell_volume() const { return std::pow(h, dim); }

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim - 1; a > axis; --a) s *= static_cast<std::size_t>(n);
  return s;
}

void require_same(const GridSpec &a, const GridSpec &b, const char *what) {
  if (!(a == b)) throw Error(std::string(what) + ": grid spec mismatch");
}

RealField::RealField(const GridSpec &spec, double value)
    : spec_(spec), values_(spec.size(), value) {}

RealField::RealField(const GridSpec &spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.size())
    throw Error("field: value count " + std::to_string(values_.size()) +
                " does not match grid size " + std::to_string(spec_.size()));
}

std::size_t RealField::flat_index(std::array<long, 3> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < spec_.dim; ++a)
    flat = flat * spec_.n + static_cast<std::size_t>(wrap_index(idx[a], spec_.n));
  return flat;
}

double RealField::at(std::array<long, 3> idx) const { return values_[flat_index(idx)]; }

std::array<int, 3> RealField::coords(std::size_t flat) const {
  std::array<int, 3> c{0, 0, 0};
  for (int a = spec_.dim - 1; a >= 0; --a) {
    c[a] = static_cast<int>(flat % spec_.n);
    flat /= spec_.n;
  }
  return c;
}

RealField &RealField::operator+=(const RealField &o) {
  require_same(spec_, o.spec_, "field +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

RealField &RealField::operator-=(const RealField &o) {
  require_same(spec_, o.spec_, "field -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

RealField &RealField::operator*=(double s) {
  for (double &v : values_) v *= s;
  return *this;
}

bool RealField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

RealField operator+(RealField a, const RealField &b) { return a += b; }
RealField operator-(RealField a, const RealField &b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }

StaggeredField::StaggeredField(const GridSpec &s) : spec(s) {
  components.reserve(static_cast<std::size_t>(s.dim));
  for (int a = 0; a < s.dim; ++a) components.emplace_back(s);
}

double mean(const RealField &f) {
  const GridSpec &s = f.spec();
  return s.cell_volume() * kernels::omp::sum(f.values()) / s.volume;
}

double inner(const RealField &f, const RealField &g) {
  require_same(f.spec(), g.spec(), "inner");
  return f.spec().cell_volume() * kernels::omp::dot(f.values(), g.values());
}

double norm2(const RealField &f) { return std::sqrt(inner(f, f)); }

double norm_inf(const RealField &f) { return kernels::omp::max_abs(f.values()); }

Norms norms(const RealField &f) {
  Norms r;
  const double l2sq = inner(f, f);
  const double gradsq = grad_norm2_squared(f);
  const RealField lap = laplacian(f);
  const double lapsq = inner(lap, lap);
  r.l2 = std::sqrt(l2sq);
  r.linf = norm_inf(f);
  r.h1 = std::sqrt(l2sq + gradsq);
  r.h2 = std::sqrt(l2sq + gradsq + lapsq);
  return r;
}

StaggeredField grad(const RealField &f) {
  StaggeredField out(f.spec());
  const auto e = extents(f.spec());
  for (int a = 0; a < f.spec().dim; ++a)
    kernels::omp::forward_diff(e, a, f.values(), out.components[a].values());
  return out;
}

RealField divergence(const StaggeredField &v) {
  RealField out(v.spec);
  RealField tmp(v.spec);
  const auto e = extents(v.spec);
  for (int a = 0; a < v.spec.dim; ++a) {
    kernels::omp::backward_diff(e, a, v.components[a].values(), tmp.values());
    out += tmp;
  }
  return out;
}

RealField laplacian(const RealField &f) {
  RealField out(f.spec());
  kernels::omp::laplacian(extents(f.spec()), f.values(), out.values());
  return out;
}

// <a_x(f^x g^x), 1> = <f^x g^x, 1> on a periodic grid: the axis average only
// relabels which face each product is attributed to.
double staggered_inner(const StaggeredField &a, const StaggeredField &b) {
  require_same(a.spec, b.spec, "staggered_inner");
  double total = 0.0;
  for (int ax = 0; ax < a.spec.dim; ++ax)
    total += kernels::omp::dot(a.components[ax].values(), b.components[ax].values());
  return a.spec.cell_volume() * total;
}

double grad_norm2_squared(const RealField &f) {
  const StaggeredField g = grad(f);
  return staggered_inner(g, g);
}

RealField cube(const RealField &f) {
  RealField out(f.spec());
  kernels::omp::cube(f.values(), out.values());
  return out;
}

} // namespace pfc
