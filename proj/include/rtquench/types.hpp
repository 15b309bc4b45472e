#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rtq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. Every numerical routine reports failure by throwing one of
// these; the CLI maps them onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent model/configuration parameters.
class ParameterError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

// A numerical procedure failed (non-convergence, overflow, ill-posed input).
class NumericalError : public Error {
public:
  using Error::Error;
};

// The eigenvector matrix is singular to working precision, so spectral
// evolution and the biorthogonal metric are undefined.
class DefectiveSpectrumError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// The initial Hamiltonian is not in the unbroken (real-spectrum) phase.
class PhaseError : public Error {
public:
  using Error::Error;
};

}  // namespace rtq
