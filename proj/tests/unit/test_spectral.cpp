#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pfc/fields.hpp"
#include "pfc/phifunc.hpp"
#include "pfc/spectral.hpp"

using namespace pfc;

TEST_CASE("signed modes") {
  CHECK(signed_mode(0, 8) == 0);
  CHECK(signed_mode(4, 8) == 4);
  CHECK(signed_mode(5, 8) == -3);
  CHECK(signed_mode(3, 7) == 3);
  CHECK(signed_mode(4, 7) == -3);
}

TEST_CASE("forward transform matches the naive DFT") {
  for (auto s : {GridSpec::make(2, 8, 3.0), GridSpec::make(3, 4, 1.0), GridSpec::make(2, 6, 1.0)}) {
    const RealField f = random_field(s, 21);
    const SpectralCoeffs c = dft(f);
    const auto ref = oracle::dft(s, oracle::widen(f));
    double err = 0;
    for (std::size_t k = 0; k < ref.size(); ++k)
      err = std::max(err, static_cast<double>(std::abs(oracle::cld(c.coeffs[k]) - ref[k])));
    CHECK(err < 1e-15);
  }
}

TEST_CASE("inverse transform round trip") {
  const auto s = GridSpec::make(3, 8, 1.0);
  const RealField f = random_field(s, 1);
  CHECK(oracle::rel_diff(idft(dft(f)), f) < 1e-15);
}

TEST_CASE("Parseval with the L^d weight") {
  const auto s = GridSpec::make(2, 16, 2.5);
  const RealField f = random_field(s, 8);
  const std::vector<double> w(s.size(), 1.0);
  CHECK(parseval_weighted(dft(f), w) == doctest::Approx(inner(f, f)).epsilon(1e-13));
}

TEST_CASE("symbol table against the long double formula") {
  const auto s = GridSpec::make(3, 6, 4.0);
  const SymbolTable t = build_symbols(s, 2.0, 0.1);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto lam = oracle::lambda(s, k);
    CHECK(t.lambda[k] == doctest::Approx(static_cast<double>(lam)).epsilon(1e-15));
    const auto Lam = ((1 - lam) * (1 - lam) + 2.0L) * lam;
    CHECK(t.Lambda[k] == doctest::Approx(static_cast<double>(Lam)).epsilon(1e-14));
  }
  CHECK(t.lambda[0] == 0.0);
  CHECK_THROWS_AS(build_symbols(s, -1.0, 0.1), Error);
  CHECK_THROWS_AS(build_symbols(s, 1.0, 0.0), Error);
}

TEST_CASE("multiplier relations") {
  const double tau = 0.3;
  for (double lam : {0.0, 0.5, 1.0, 3.0, 40.0}) {
    const double Lam = ((1 - lam) * (1 - lam) + 1.5) * lam;
    const PhiEval p = phi(tau * Lam);
    auto m = [&](DiagonalOp op) { return diagonal_multiplier(op, lam, Lam, tau); };
    CHECK(m(DiagonalOp::exp) == doctest::Approx(p.phi0));
    CHECK(m(DiagonalOp::G) == doctest::Approx(p.phi1));
    CHECK(m(DiagonalOp::G1) == doctest::Approx(p.phi2));
    CHECK(m(DiagonalOp::G0) * m(DiagonalOp::G0) == doctest::Approx(p.phi1));
    CHECK(m(DiagonalOp::G3) * m(DiagonalOp::G3) == doctest::Approx(p.phi2));
    CHECK(m(DiagonalOp::G4) * m(DiagonalOp::G4) == doctest::Approx(m(DiagonalOp::G2)));
    CHECK(m(DiagonalOp::laplacian) == -lam);
    CHECK(m(DiagonalOp::biharmonic) == doctest::Approx(lam * lam));
    CHECK(m(DiagonalOp::g_lkappa) == doctest::Approx(p.phi1 * Lam));
    const double g5 = m(DiagonalOp::G5);
    CHECK(g5 * g5 == doctest::Approx((1 - std::exp(-tau * Lam)) / tau * lam * lam));
  }
}

TEST_CASE("operator names round trip") {
  for (const char *name : {"exp", "phi1", "phi2", "G", "G0", "G1", "G2", "G3", "G4", "G5",
                           "laplacian", "biharmonic", "stab_lap", "lkappa", "g_lkappa"})
    CHECK(to_string(parse_diagonal_op(name)) == name);
  CHECK_THROWS_AS(parse_diagonal_op("G7"), Error);
}

TEST_CASE("diagonal laplacian equals the stencil") {
  for (int dim : {2, 3}) {
    const auto s = GridSpec::make(dim, dim == 2 ? 32 : 12, 6.0);
    const SymbolTable t = build_symbols(s, 0.0, 1.0);
    const RealField f = random_field(s, 13);
    CHECK(oracle::rel_diff(apply_diagonal(f, t, DiagonalOp::laplacian), laplacian(f)) < 1e-12);
  }
}

TEST_CASE("single mode is an eigenvector of every diagonal operator") {
  const auto s = GridSpec::make(2, 16, 5.0);
  const SymbolTable t = build_symbols(s, 1.0, 0.5);
  const RealField f = single_mode(s, {2, 3, 0}, 1.0);
  const std::size_t k = 2 * 16 + 3;
  const RealField g = apply_diagonal(f, t, DiagonalOp::G5);
  const double m = diagonal_multiplier(DiagonalOp::G5, t.lambda[k], t.Lambda[k], t.tau);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == doctest::Approx(m * f[i]).epsilon(1e-12));
}

TEST_CASE("lowpass keeps low modes and removes high ones") {
  const auto s = GridSpec::make(2, 16, 1.0);
  const RealField low = single_mode(s, {2, 1, 0}, 1.0);
  const RealField high = single_mode(s, {6, 0, 0}, 1.0);
  CHECK(oracle::rel_diff(lowpass(low, 2), low) < 1e-14);
  CHECK(norm_inf(lowpass(high, 5)) < 1e-15);
  CHECK_THROWS_AS(lowpass(low, 9), Error);
}

TEST_CASE("multiplier imaginary residue guard") {
  const auto s = GridSpec::make(2, 8, 1.0);
  const RealField f = random_field(s, 4);
  std::vector<double> odd(s.size(), 0.0);
  odd[1] = 1.0; // not even in k, so the result is complex
  CHECK_THROWS_AS(apply_multiplier(f, odd), Error);
}
