#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pfc/phifunc.hpp"

using namespace pfc;

namespace {

double rel(double x, const oracle::big &ref) {
  const double r = static_cast<double>(ref);
  return r == 0.0 ? std::abs(x) : std::abs(x - r) / std::abs(r);
}

} // namespace

TEST_CASE("limits at zero are exact") {
  const PhiEval p = phi(0.0);
  CHECK(p.phi0 == 1.0);
  CHECK(p.phi1 == 1.0);
  CHECK(p.phi2 == 0.5);
  CHECK(phi_ratio(0.0) == 0.5);
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(phi(-1e-3), Error);
  CHECK_THROWS_AS(phi(std::nan("")), Error);
  CHECK_THROWS_AS(phi(INFINITY), Error);
}

TEST_CASE("agreement with the 50-digit reference around the switch points") {
  for (double a : {1e-300, 1e-12, 1e-8, 1e-4, 0.1, 0.4999999, 0.5, 0.5000001, 0.7, 1.0, 3.0,
                   30.0, 300.0, 707.9, 708.0}) {
    CAPTURE(a);
    const PhiEval p = phi(a);
    const auto r = oracle::phi(a);
    CHECK(rel(p.phi0, r.phi0) < 1e-14);
    CHECK(rel(p.phi1, r.phi1) < 1e-14);
    CHECK(rel(p.phi2, r.phi2) < 1e-14);
  }
}

TEST_CASE("series and closed form overlap near the threshold") {
  for (double a : {0.3, 0.5, 0.8}) {
    CHECK(detail::phi2_series(a) == doctest::Approx(detail::phi2_closed(a)).epsilon(1e-14));
  }
}

TEST_CASE("beyond the underflow threshold the asymptotic forms are used") {
  const PhiEval p = phi(1e4);
  CHECK(p.phi0 == 0.0);
  CHECK(p.phi1 == doctest::Approx(1e-4).epsilon(1e-15));
  CHECK(p.phi2 == doctest::Approx((1e4 - 1.0) / 1e8).epsilon(1e-15));
}

TEST_CASE("ratio phi2/phi1 lies in [1/2, 1) and increases") {
  double prev = 0.5;
  for (double a = 1e-3; a < 1e3; a *= 1.3) {
    const double r = phi_ratio(a);
    CHECK(r >= prev);
    CHECK(r < 1.0);
    prev = r;
  }
}
