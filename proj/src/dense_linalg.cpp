#include "rtquench/dense_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <lapacke.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace rtq {
namespace {

lapack_complex_double* as_lapack(Complex* p) {
  return reinterpret_cast<lapack_complex_double*>(p);
}

bool is_hermitian(const ComplexMatrix& M) {
  const double scale = std::max(M.norm(), 1.0);
  return (M - M.adjoint()).norm() <= 1e-14 * scale;
}

std::vector<Eigen::Index> sort_order(const StateVector& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (values[a].real() != values[b].real()) return values[a].real() < values[b].real();
    return values[a].imag() < values[b].imag();
  });
  return order;
}

void raw_eig(const ComplexMatrix& M, bool want_vectors, StateVector& values,
             ComplexMatrix& vectors) {
  const auto n = static_cast<lapack_int>(M.rows());
  values.resize(n);
  if (is_hermitian(M)) {
    ComplexMatrix work = M;
    RealVector w(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n,
                                           as_lapack(work.data()), n, w.data());
    if (info != 0) {
      throw NumericalError("zheevd failed to converge (info = " + std::to_string(info) + ")");
    }
    values = w.cast<Complex>();
    if (want_vectors) vectors = std::move(work);
    return;
  }
  ComplexMatrix work = M;
  if (want_vectors) vectors.resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, as_lapack(work.data()), n,
                    as_lapack(values.data()), nullptr, 1,
                    want_vectors ? as_lapack(vectors.data()) : nullptr, want_vectors ? n : 1);
  if (info > 0) {
    throw NumericalError("zgeev QR iteration failed; " + std::to_string(info) +
                         " eigenvalues did not converge");
  }
  if (info < 0) throw NumericalError("zgeev argument " + std::to_string(-info) + " invalid");
}

}  // namespace

double Spectrum::max_abs_imag() const {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.imag().cwiseAbs().maxCoeff();
}

Spectrum eig_complex(const ComplexMatrix& M, const EigOptions& options) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw DimensionError("eig_complex needs a non-empty square matrix");
  }
  if (!M.allFinite()) throw NumericalError("eig_complex: matrix has non-finite entries");

  StateVector raw_values;
  ComplexMatrix raw_vectors;
  raw_eig(M, true, raw_values, raw_vectors);

  const auto order = sort_order(raw_values);
  const Eigen::Index n = M.rows();
  Spectrum out;
  out.eigenvalues.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.eigenvalues[j] = raw_values[src];
    const double norm = raw_vectors.col(src).norm();
    out.vectors.col(j) = raw_vectors.col(src) / (norm > 0.0 ? norm : 1.0);
  }

  const double h_norm = std::max(M.norm(), std::numeric_limits<double>::min());
  out.residual =
      (M * out.vectors - out.vectors * out.eigenvalues.asDiagonal()).norm() / h_norm;

  const Eigen::PartialPivLU<ComplexMatrix> lu(out.vectors);
  const double rcond = lu.rcond();
  out.condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (rcond > 0.0) {
    out.inverse = lu.inverse();
    if (!out.inverse.allFinite()) out.inverse.resize(0, 0);
  }
  out.defective = !(out.condition <= options.condition_threshold) ||
                  !(out.residual <= options.residual_threshold) || out.inverse.size() == 0;
  return out;
}

StateVector eigenvalues_only(const ComplexMatrix& M) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw DimensionError("eigenvalues_only needs a non-empty square matrix");
  }
  if (!M.allFinite()) throw NumericalError("eigenvalues_only: matrix has non-finite entries");
  StateVector raw;
  ComplexMatrix unused;
  raw_eig(M, false, raw, unused);
  const auto order = sort_order(raw);
  StateVector out(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) out[j] = raw[order[static_cast<std::size_t>(j)]];
  return out;
}

Metric biortho_metric(const Spectrum& spectrum) {
  if (spectrum.defective) {
    throw DefectiveSpectrumError(
        "biorthogonal metric undefined: eigenvector matrix is not invertible "
        "(broken phase or exceptional point)");
  }
  const ComplexMatrix theta = spectrum.inverse.adjoint() * spectrum.inverse;
  return Metric{(theta + theta.adjoint()) / 2.0};
}

Complex metric_inner(const Metric& metric, const StateVector& u, const StateVector& v) {
  if (u.size() != metric.theta.rows() || v.size() != metric.theta.rows()) {
    throw DimensionError("metric_inner: vector dimension does not match metric");
  }
  return u.dot(metric.theta * v);  // Eigen's dot conjugates the left operand
}

StateVector evolve(const Spectrum& spectrum, const StateVector& psi0, double t) {
  if (spectrum.defective) {
    throw DefectiveSpectrumError(
        "spectral evolution needs a diagonalisable Hamiltonian; use matexp_reference");
  }
  if (psi0.size() != spectrum.dim()) throw DimensionError("evolve: state dimension mismatch");
  if (t == 0.0) return psi0;
  StateVector coeffs = spectrum.inverse * psi0;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs[k] *= std::exp(-kI * spectrum.eigenvalues[k] * t);
  }
  StateVector out = spectrum.vectors * coeffs;
  if (!out.allFinite()) throw NumericalError("evolve: amplitude overflow");
  return out;
}

ComplexMatrix matexp_reference(const ComplexMatrix& M, double t) {
  if (M.rows() != M.cols()) throw DimensionError("matexp_reference needs a square matrix");
  const ComplexMatrix generator = (-kI * t) * M;
  if (!generator.allFinite()) throw NumericalError("matexp_reference: non-finite M t");
  ComplexMatrix out = generator.exp();
  if (!out.allFinite()) throw NumericalError("matexp_reference: exponential overflows");
  return out;
}

}  // namespace rtq
