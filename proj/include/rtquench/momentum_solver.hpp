#pragma once

#include <array>
#include <span>
#include <vector>

#include "rtquench/dense_linalg.hpp"
#include "rtquench/echo_series.hpp"
#include "rtquench/models.hpp"

namespace rtq {

// Momentum angles entering the mode product. iXY: phi_p = 2 pi p / N for
// p = 1..N/2. iATXY: N/2 uniform points on [-pi/2, pi/2) (the endpoints are
// the same mode).
struct MomentumGrid {
  ModelKind model = ModelKind::IXY;
  std::vector<double> angles;

  std::size_t n_modes() const { return angles.size(); }
};

MomentumGrid momentum_grid(ModelKind model, int n_sites);

// Traceless 2x2 Bogoliubov block of the iXY chain.
ComplexMatrix ixy_block(double h, double gamma, double phi);

// Principal root of (h - cos phi)^2 - gamma^2 sin^2 phi.
Complex ixy_dispersion(double h, double gamma, double phi);

// 4x4 block of the iATXY chain that contains the lowest-energy state.
ComplexMatrix iatxy_block(double h, double h_a, double gamma, double phi);

// Closed-form eigenvalues {-+ sqrt(X - 2 sqrt(Y)), -+ sqrt(X + 2 sqrt(Y))} of
// iatxy_block, X = h^2 + h_a^2 + cos^2 - gamma^2 sin^2,
// Y = h^2 h_a^2 + h^2 cos^2 - h_a^2 gamma^2 sin^2.
std::array<Complex, 4> iatxy_eigenvalues(double h, double h_a, double gamma, double phi);

// One iXY momentum mode quenched h0 -> h1, written in the eigenframe of the
// initial block where the mode ground state is (1, 0).
struct ModeQuench {
  double phi = 0.0;
  double h0 = 0.0;
  double h1 = 0.0;
  double gamma = 0.0;
  Complex eps0;  // initial dispersion, real and > 0 in the unbroken phase
  Complex eps1;  // quench dispersion, imaginary when the mode is broken
  double delta = 0.0;
  double omega = 0.0;
  // Amplitudes of (1, 0) in the quench block's Jordan basis. Diagonalisable
  // block: biorthonormal eigenbasis, |c1|^2 + |c2|^2 = 1, c1 on -eps1.
  // Defective block: c1 on the unit eigenvector, c2 on its unit orthogonal
  // complement (the generalised direction).
  Complex c1;
  Complex c2;
  bool defective = false;

  // Quench block (1/eps0) [[-delta, omega], [-omega, delta]].
  ComplexMatrix quench_block() const;
};

// Throws PhaseError if the initial block is broken and NumericalError when
// |eps0| < 1e-12.
ModeQuench make_mode_quench(double h0, double h1, double gamma, double phi);

// |a_p|^2 / (|a_p|^2 + |b_p|^2), evaluated with exponentially rescaled
// complex trigonometry so broken modes do not overflow at late times.
double ixy_mode_echo(const ModeQuench& mq, double t);
double ixy_mode_log_echo(const ModeQuench& mq, double t);

// Spectral evolution of one iATXY 4x4 block in the Dyson frame of the
// initial block. Construction diagonalises both blocks once; evaluation at a
// time is O(16).
class IatxyModeQuench {
public:
  IatxyModeQuench(double h0, double h1, double h_a, double gamma, double phi,
                  const EigOptions& options = {});

  double log_echo(double t) const;
  double echo(double t) const;
  bool quench_defective() const { return quench_.defective; }
  double phi() const { return phi_; }

private:
  double phi_;
  ComplexMatrix quench_block_;
  ComplexMatrix initial_inverse_;
  StateVector ground_;
  Spectrum quench_;
  ComplexMatrix frame_change_;  // P0^{-1} P1
  StateVector quench_coeffs_;   // P1^{-1} psi0
  double growth_ = 0.0;         // max Im of the quench spectrum
};

double iatxy_mode_echo(double h0, double h1, double h_a, double gamma, double phi, double t);

struct MomentumOptions {
  EigOptions eig;
  int threads = 1;
};

// Mode sum ln L(t) = sum_p ln L_p(t) in ascending-phi order; the rate is
// -ln L / N. Only IXY and IATXY are supported.
EchoSeries rate_function(const ModelParams& params, double h0, double h1,
                         std::span<const double> times, const MomentumOptions& options = {});

}  // namespace rtq
