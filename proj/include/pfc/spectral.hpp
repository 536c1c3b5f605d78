#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pfc/grid.hpp"

namespace pfc {

using Complex = std::complex<double>;

// Expansion coefficients c_k with f(x) = sum_k c_k exp(2 pi i k.x / L).
// Layout matches RealField (row-major, last axis fastest); DFT index m on an
// axis stands for the signed mode signed_mode(m, N).
struct SpectralCoeffs {
  GridSpec spec{};
  std::vector<Complex> coeffs;
};

// m in [0, N) -> signed mode in [-ceil(N/2)+1, floor(N/2)]
inline int signed_mode(int m, int n) { return 2 * m <= n ? m : m - n; }

// Owns FFTW-aligned scratch buffers for one grid; plans come from a
// process-wide cache. One Transform per thread / simulation.
class Transform {
public:
  explicit Transform(const GridSpec &spec);
  ~Transform();
  Transform(const Transform &) = delete;
  Transform &operator=(const Transform &) = delete;

  const GridSpec &spec() const { return spec_; }

  void forward(std::span<const double> real, std::span<Complex> coeffs);
  // Returns max |imag| of the synthesized values, which are discarded.
  double inverse(std::span<const Complex> coeffs, std::span<double> real);
  void forward_complex(std::span<const Complex> in, std::span<Complex> coeffs);
  void inverse_complex(std::span<const Complex> coeffs, std::span<Complex> out);

  struct Plans; // cached FFTW plans, defined in spectral.cpp

private:
  GridSpec spec_;
  std::shared_ptr<const Plans> plans_;
  Complex *in_ = nullptr;
  Complex *out_ = nullptr;
};

SpectralCoeffs dft(const RealField &f);
RealField idft(const SpectralCoeffs &c);

// Per-mode eigenvalues of -Lap_h (lambda) and of
// L_kappa = -Lap_h((I + Lap_h)^2 + kappa I) (Lambda).
struct SymbolTable {
  GridSpec spec{};
  double kappa = 0.0;
  double tau = 0.0;
  std::vector<double> lambda;
  std::vector<double> Lambda;
};

SymbolTable build_symbols(const GridSpec &spec, double kappa, double tau);

enum class DiagonalOp {
  exp,        // e^{-tau Lambda}
  phi1,       // phi1(tau Lambda), same as G
  phi2,       // phi2(tau Lambda), same as G1
  G,
  G0,         // sqrt(phi1)
  G1,
  G2,         // phi2 / phi1
  G3,         // sqrt(phi2)
  G4,         // sqrt(phi2 / phi1)
  G5,         // sqrt((1 - e^{-tau Lambda}) / tau) * lambda
  laplacian,  // -lambda
  biharmonic, // lambda^2
  stab_lap,   // (1 - lambda)^2, symbol of (I + Lap_h)^2
  lkappa,     // Lambda
  g_lkappa,   // phi1(tau Lambda) * Lambda = (1 - e^{-tau Lambda}) / tau
};

DiagonalOp parse_diagonal_op(std::string_view name);
std::string_view to_string(DiagonalOp op);

double diagonal_multiplier(DiagonalOp op, double lambda, double Lambda, double tau);
std::vector<double> multiplier_table(const SymbolTable &table, DiagonalOp op);

// idft(m . dft(f)) for a real, even multiplier m.
RealField apply_multiplier(const RealField &f, std::span<const double> m);
RealField apply_diagonal(const RealField &f, const SymbolTable &table, DiagonalOp op);

// Zeroes every coefficient with some |signed mode| > cutoff.
RealField lowpass(const RealField &f, int cutoff);

// L^dim * sum_k w_k |c_k|^2, the Parseval form of ||W^{1/2} f||_2^2.
double parseval_weighted(const SpectralCoeffs &c, std::span<const double> weight);

} // namespace pfc
