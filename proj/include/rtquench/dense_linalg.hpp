#pragma once

#include "rtquench/types.hpp"

namespace rtq {

struct EigOptions {
  // A spectrum is flagged defective when cond(P) exceeds this bound...
  double condition_threshold = 1e10;
  // ...or when ||H P - P diag(lambda)||_F / ||H||_F exceeds this one.
  double residual_threshold = 1e-8;
};

// Right eigensystem of a dense complex matrix. Eigenvalues are sorted by
// ascending real part, ties broken by ascending imaginary part; columns of
// `vectors` follow the same order and have unit Euclidean norm.
struct Spectrum {
  StateVector eigenvalues;
  ComplexMatrix vectors;
  ComplexMatrix inverse;  // empty when `vectors` is exactly singular
  bool defective = false;
  double condition = 0.0;
  double residual = 0.0;

  Eigen::Index dim() const { return eigenvalues.size(); }
  double max_abs_imag() const;
};

Spectrum eig_complex(const ComplexMatrix& M, const EigOptions& options = {});

// Eigenvalues only, in the same order as eig_complex.
StateVector eigenvalues_only(const ComplexMatrix& M);

// Hermitian positive-definite metric Theta with H^dagger Theta = Theta H.
struct Metric {
  ComplexMatrix theta;
};

// Theta = (P^{-1})^dagger P^{-1}; throws DefectiveSpectrumError when P is not
// invertible.
Metric biortho_metric(const Spectrum& spectrum);

Complex metric_inner(const Metric& metric, const StateVector& u, const StateVector& v);

// P exp(-i Lambda t) P^{-1} psi0, unnormalised.
StateVector evolve(const Spectrum& spectrum, const StateVector& psi0, double t);

// exp(-i M t) by Pade scaling and squaring; valid for defective M.
ComplexMatrix matexp_reference(const ComplexMatrix& M, double t);

}  // namespace rtq
