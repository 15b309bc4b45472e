#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rtquench/dense_linalg.hpp"
#include "rtquench/models.hpp"

using namespace rtq;

TEST_CASE("eigenvalues are sorted by real then imaginary part") {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m.diagonal() << Complex(2, 0), Complex(-1, 1), Complex(-1, -1), Complex(0.5, 0);
  m(0, 1) = 1e-3;  // keep the general (non-Hermitian) path
  const Spectrum s = eig_complex(m);
  CHECK(s.eigenvalues[0].imag() == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[1].imag() == doctest::Approx(1.0));
  CHECK(s.eigenvalues[2].real() == doctest::Approx(0.5));
  CHECK(s.eigenvalues[3].real() == doctest::Approx(2.0));
  CHECK_FALSE(s.defective);
}

TEST_CASE("random complex matrices decompose with unit columns and a valid inverse") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix m = oracle::random_matrix(6, rng);
    const Spectrum s = eig_complex(m);
    CHECK_FALSE(s.defective);
    CHECK(s.residual < 1e-12);
    for (Eigen::Index j = 0; j < 6; ++j) CHECK(s.vectors.col(j).norm() == doctest::Approx(1.0));
    CHECK((s.inverse * s.vectors - ComplexMatrix::Identity(6, 6)).norm() < 1e-10);
    const StateVector only = eigenvalues_only(m);
    CHECK((only - s.eigenvalues).norm() < 1e-10);
  }
}

TEST_CASE("Hermitian input gives real sorted eigenvalues and a unitary basis") {
  std::mt19937_64 rng(4);
  const ComplexMatrix a = oracle::random_matrix(5, rng);
  const ComplexMatrix h = a + a.adjoint();
  const Spectrum s = eig_complex(h);
  CHECK(s.max_abs_imag() == 0.0);
  for (Eigen::Index j = 1; j < 5; ++j) CHECK(s.eigenvalues[j].real() >= s.eigenvalues[j - 1].real());
  CHECK((s.vectors.adjoint() * s.vectors - ComplexMatrix::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("Jordan block is flagged defective") {
  ComplexMatrix j(2, 2);
  j << 0.3, 1.0, 0.0, 0.3;
  const Spectrum s = eig_complex(j);
  CHECK(s.defective);
  CHECK_THROWS_AS(biortho_metric(s), DefectiveSpectrumError);
  CHECK_THROWS_AS(evolve(s, StateVector::Ones(2), 1.0), DefectiveSpectrumError);
}

TEST_CASE("input checks") {
  CHECK_THROWS_AS(eig_complex(ComplexMatrix::Zero(2, 3)), DimensionError);
  ComplexMatrix nan = ComplexMatrix::Identity(2, 2);
  nan(0, 1) = Complex(NAN, 0);
  CHECK_THROWS_AS(eig_complex(nan), NumericalError);
  const Spectrum s = eig_complex(ComplexMatrix::Identity(3, 3));
  const Metric m = biortho_metric(s);
  CHECK_THROWS_AS(metric_inner(m, StateVector::Ones(2), StateVector::Ones(3)), DimensionError);
}

TEST_CASE("biorthogonal metric of an unbroken RT-symmetric chain") {
  ModelParams p{ModelKind::IXY, 0.5, 0.0, 2.0, 0.0, 1.0, 6};
  const ComplexMatrix H = build_hamiltonian(p);
  const Spectrum s = eig_complex(H);
  REQUIRE(s.max_abs_imag() < 1e-10);
  const Metric m = biortho_metric(s);
  CHECK((m.theta - m.theta.adjoint()).norm() == 0.0);
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m.theta);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK((H.adjoint() * m.theta - m.theta * H).norm() < 1e-8);
  // In the Theta inner product the right eigenvectors are orthonormal.
  for (Eigen::Index a = 0; a < 4; ++a) {
    for (Eigen::Index b = 0; b < 4; ++b) {
      const Complex v = metric_inner(m, s.vectors.col(a), s.vectors.col(b));
      CHECK(std::abs(v - (a == b ? 1.0 : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("matrix exponential of a Jordan block matches its closed form") {
  const double a = 0.7, t = 2.5;
  ComplexMatrix j(2, 2);
  j << a, 1.0, 0.0, a;
  const ComplexMatrix u = matexp_reference(j, t);
  const Complex phase = std::exp(Complex(0, -a * t));
  CHECK(std::abs(u(0, 0) - phase) < 1e-13);
  CHECK(std::abs(u(1, 1) - phase) < 1e-13);
  CHECK(std::abs(u(0, 1) - Complex(0, -t) * phase) < 1e-13);
  CHECK(std::abs(u(1, 0)) < 1e-13);
}

TEST_CASE("spectral evolution agrees with the matrix exponential") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix m = oracle::random_matrix(6, rng) * 0.3;
    const StateVector psi = oracle::random_matrix(6, rng).col(0);
    const Spectrum s = eig_complex(m);
    REQUIRE_FALSE(s.defective);
    const StateVector a = evolve(s, psi, 1.3);
    const StateVector b = matexp_reference(m, 1.3) * psi;
    CHECK((a - b).norm() / b.norm() < 1e-8);
  }
  CHECK((evolve(eig_complex(ComplexMatrix::Identity(2, 2)), StateVector::Ones(2), 0.0) -
         StateVector::Ones(2)).norm() == 0.0);
}

TEST_CASE("overflowing exponential is reported") {
  ComplexMatrix m(1, 1);
  m(0, 0) = Complex(0.0, 1.0);  // exp(-i * i * t) = exp(t)
  CHECK_THROWS_AS(matexp_reference(m, 1e4), NumericalError);
}
