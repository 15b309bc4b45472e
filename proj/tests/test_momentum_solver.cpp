#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rtquench/momentum_solver.hpp"
#include "rtquench/quench_analysis.hpp"

using namespace rtq;
using std::numbers::pi;

namespace {

// Echo of the mode ground state evolved with the dense 2x2 machinery, measured
// in the Dyson frame of the initial block.
double generic_block_echo(double h0, double h1, double gamma, double phi, double t) {
  const Spectrum s0 = eig_complex(ixy_block(h0, gamma, phi));
  const StateVector psi0 = s0.vectors.col(0);
  const Spectrum s1 = eig_complex(ixy_block(h1, gamma, phi));
  const StateVector mapped = s0.inverse * evolve(s1, psi0, t);
  return std::norm(mapped[0]) / mapped.squaredNorm();
}

// Nearest-neighbour matching of two small eigenvalue sets.
double set_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const Complex& x : a) {
    double best = INFINITY;
    std::size_t pick = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && std::abs(x - b[j]) < best) {
        best = std::abs(x - b[j]);
        pick = j;
      }
    }
    used[pick] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<Complex> to_vector(const StateVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("momentum grids") {
  const MomentumGrid ixy = momentum_grid(ModelKind::IXY, 8);
  REQUIRE(ixy.n_modes() == 4);
  for (std::size_t p = 0; p < 4; ++p) CHECK(ixy.angles[p] == doctest::Approx(2 * pi * (p + 1) / 8));
  CHECK(ixy.angles.back() == doctest::Approx(pi));

  const MomentumGrid at = momentum_grid(ModelKind::IATXY, 8);
  REQUIRE(at.n_modes() == 4);
  CHECK(at.angles.front() == doctest::Approx(-pi / 2));
  CHECK(at.angles.back() == doctest::Approx(pi / 4));
  for (std::size_t p = 1; p < 4; ++p) CHECK(at.angles[p] > at.angles[p - 1]);

  CHECK_THROWS_AS(momentum_grid(ModelKind::IXY, 7), ParameterError);
  CHECK_THROWS_AS(momentum_grid(ModelKind::IXYZ_SR, 8), ParameterError);
}

TEST_CASE("iXY block") {
  CHECK(ixy_block(1.0, 1.0, 0.0).norm() == 0.0);
  ComplexMatrix expected(2, 2);
  expected << 2, -1, 1, -2;
  CHECK((ixy_block(2.0, 1.0, pi / 2) - expected).norm() < 1e-15);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 10; ++i) CHECK(std::abs(ixy_block(u(rng), u(rng), u(rng)).trace()) < 1e-15);
}

TEST_CASE("iXY dispersion against the block eigenvalues") {
  for (auto [h, expected] : {std::pair{2.0, Complex(std::sqrt(3.0), 0)},
                             std::pair{0.5, Complex(0, std::sqrt(0.75))}}) {
    const Complex eps = ixy_dispersion(h, 1.0, pi / 2);
    CHECK(std::abs(eps - expected) < 1e-12);
    const StateVector ev = eigenvalues_only(ixy_block(h, 1.0, pi / 2));
    CHECK(set_distance({-eps, eps}, to_vector(ev)) < 1e-12);
  }
  CHECK(ixy_dispersion(0.3, 0.0, 1.1).real() == doctest::Approx(std::abs(0.3 - std::cos(1.1))));
}

TEST_CASE("iATXY block") {
  SUBCASE("h_a = 0 reduces to two iXY branches") {
    const double h = 1.7, g = 0.8, phi = 0.6;
    const StateVector ev = eigenvalues_only(iatxy_block(h, 0.0, g, phi));
    const Complex e1 = ixy_dispersion(h, g, phi);
    const Complex e2 = ixy_dispersion(h, g, pi - phi);
    CHECK(set_distance({-e1, e1, -e2, e2}, to_vector(ev)) < 1e-10);
  }
  SUBCASE("unbroken example has a real spectrum") {
    const StateVector ev = eigenvalues_only(iatxy_block(3.0, 0.5, 1.0, 0.0));
    CHECK(ev.imag().cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("closed form matches numerical eigenvalues") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::uniform_real_distribution<double> angle(-pi / 2, pi / 2);
    for (int i = 0; i < 200; ++i) {
      const double h = u(rng), ha = u(rng) / 2, g = u(rng) / 1.5, phi = angle(rng);
      const auto closed = iatxy_eigenvalues(h, ha, g, phi);
      const StateVector ev = eigenvalues_only(iatxy_block(h, ha, g, phi));
      const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
      // Near-degenerate pairs split as sqrt(perturbation), so allow for that.
      CHECK(set_distance({closed.begin(), closed.end()}, to_vector(ev)) < 1e-6 * scale);
    }
  }
}

TEST_CASE("mode quench construction") {
  CHECK_THROWS_AS(make_mode_quench(0.5, 2.0, 1.0, pi / 2), PhaseError);
  CHECK_THROWS_AS(make_mode_quench(1.0, 2.0, 0.5, 0.0), NumericalError);
  try {
    make_mode_quench(0.5, 2.0, 1.0, pi / 2);
  } catch (const PhaseError& e) {
    CHECK(std::string(e.what()).find("phi=") != std::string::npos);
  }
  const ModeQuench mq = make_mode_quench(2.0, 1.3, 0.7, 0.9);
  CHECK(mq.delta == doctest::Approx((2 - std::cos(0.9)) * (1.3 - std::cos(0.9)) -
                                    0.49 * std::sin(0.9) * std::sin(0.9)));
  CHECK(mq.omega == doctest::Approx(0.7 * (1.3 - 2.0) * std::sin(0.9)));
  // delta^2 - omega^2 = (eps0 eps1)^2
  CHECK(mq.delta * mq.delta - mq.omega * mq.omega ==
        doctest::Approx(std::norm(mq.eps0 * mq.eps1)).epsilon(1e-12));
}

TEST_CASE("iXY mode echo basics") {
  const ModeQuench same = make_mode_quench(2.0, 2.0, 1.0, 0.7);
  for (double t : {0.0, 1.0, 17.3, 400.0}) CHECK(ixy_mode_echo(same, t) == doctest::Approx(1.0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const ModeQuench mq = make_mode_quench(2.5, u(rng), 1.0, u(rng));
    CHECK(ixy_mode_echo(mq, 0.0) == 1.0);
    const double l = ixy_mode_echo(mq, 10 * u(rng));
    CHECK(l >= 0.0);
    CHECK(l <= 1.0 + 1e-14);
  }
  // Broken mode at very late times stays finite thanks to the rescaling.
  const ModeQuench broken = make_mode_quench(2.0, 0.5, 1.0, pi / 2);
  CHECK(std::isfinite(ixy_mode_log_echo(broken, 1e5)));
}

TEST_CASE("closed-form mode echo equals the generic 2x2 spectral path") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> field(0.0, 3.0);
  std::uniform_real_distribution<double> angle(0.05, pi - 0.05);
  for (int i = 0; i < 200; ++i) {
    const double h1 = field(rng), phi = angle(rng), t = 20 * field(rng) / 3;
    const ModeQuench mq = make_mode_quench(2.0, h1, 1.0, phi);
    if (mq.defective) continue;
    CAPTURE(h1);
    CAPTURE(phi);
    CHECK(std::abs(ixy_mode_echo(mq, t) - generic_block_echo(2.0, h1, 1.0, phi, t)) < 1e-10);
  }
}

TEST_CASE("unbroken quench follows cos^2 + (|c1|^2 - |c2|^2)^2 sin^2 in its own frame") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double g = 0.2 + 1.3 * u(rng);
    const double ep = std::sqrt(1 + g * g);
    const double h0 = ep + 0.05 + 2 * u(rng);
    const double h1 = ep + 0.05 + 2 * u(rng);
    const double phi = pi * u(rng);
    const double t = 30 * u(rng);
    const ModeQuench mq = make_mode_quench(h0, h1, g, phi);
    CHECK(std::norm(mq.c1) + std::norm(mq.c2) == doctest::Approx(1.0).epsilon(1e-12));

    // Evolve (1, 0) with the quench block and measure in its Dyson frame.
    const Spectrum s = eig_complex(mq.quench_block());
    StateVector e1 = StateVector::Zero(2);
    e1[0] = 1.0;
    const StateVector a = s.inverse * e1;
    const StateVector b = s.inverse * evolve(s, e1, t);
    const double measured = std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());

    const double c = std::cos(mq.eps1.real() * t), sn = std::sin(mq.eps1.real() * t);
    const double contrast = std::norm(mq.c1) - std::norm(mq.c2);
    CHECK(std::abs(measured - (c * c + contrast * contrast * sn * sn)) < 1e-9);
  }
}

TEST_CASE("critical broken mode approaches |c1|^2") {
  const ModeQuench mq = make_mode_quench(2.0, 1.0, 1.0, pi / 2);
  REQUIRE(mq.defective);
  CHECK(std::norm(mq.c1) + std::norm(mq.c2) == doctest::Approx(1.0));
  CHECK(std::abs(ixy_mode_echo(mq, 1e4) - std::norm(mq.c1)) < 1e-3);
}

TEST_CASE("broken mode saturates to a constant below one") {
  const ModeQuench mq = make_mode_quench(2.0, 0.5, 1.0, pi / 2);
  const double a = ixy_mode_echo(mq, 1e3), b = ixy_mode_echo(mq, 1e4);
  CHECK(a < 1.0);
  CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("iATXY mode echo") {
  SUBCASE("t = 0") { CHECK(iatxy_mode_echo(3.0, 1.0, 0.5, 1.0, 0.3, 0.0) == doctest::Approx(1.0)); }
  SUBCASE("h_a = 0 reduces to the iXY mode at pi - phi") {
    for (double h1 : {0.4, 1.0, 1.8, 2.6}) {
      for (double phi : {-1.2, -0.3, 0.5, 1.4}) {
        for (double t : {0.7, 5.0, 40.0}) {
          const double a = iatxy_mode_echo(3.0, h1, 0.0, 1.0, phi, t);
          const double b = ixy_mode_echo(make_mode_quench(3.0, h1, 1.0, pi - phi), t);
          CHECK(std::abs(a - b) < 1e-9);
        }
      }
    }
  }
  SUBCASE("agrees with a dense matrix-exponential propagation") {
    const double h0 = 3.0, h1 = 1.0, ha = 0.5, g = 1.0, phi = 0.3;
    const Spectrum s0 = eig_complex(iatxy_block(h0, ha, g, phi));
    const StateVector psi0 = s0.vectors.col(0);
    double previous_min = 1.0;
    for (double t : {0.5, 2.0, 5.0, 12.0}) {
      const StateVector mapped = s0.inverse * (matexp_reference(iatxy_block(h1, ha, g, phi), t) * psi0);
      const double oracle_value = std::norm(mapped[0]) / mapped.squaredNorm();
      const double value = iatxy_mode_echo(h0, h1, ha, g, phi, t);
      CHECK(std::abs(value - oracle_value) < 1e-9);
      CHECK(value > 0.0);
      CHECK(value < 1.0);
      previous_min = std::min(previous_min, value);
    }
    CHECK(previous_min < 0.9);
  }
  SUBCASE("broken initial block is refused") {
    CHECK_THROWS_AS(IatxyModeQuench(0.5, 3.0, 0.5, 1.0, pi / 2), PhaseError);
  }
}

TEST_CASE("rate function") {
  ModelParams p{ModelKind::IXY, 1.0, 0.0, 0.0, 0.0, 1.0, 200};
  const std::vector<double> times = TimeGrid{20.0, 0.05}.points();
  SUBCASE("no quench") {
    const EchoSeries s = rate_function(p, 2.0, 2.0, times);
    for (double x : s.log_echo) CHECK(std::abs(x) < 1e-12);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(rate_function(p, 1.0, 2.0, times), PhaseError);
    ModelParams sr{ModelKind::IXYZ_SR, 0.25, 0.1, 0.0, 0.0, 1.0, 8};
    CHECK_THROWS_AS(rate_function(sr, 3.0, 1.0, times), ParameterError);
  }
  SUBCASE("bit-identical for any worker count") {
    ModelParams at{ModelKind::IATXY, 1.0, 0.0, 0.0, 0.5, 1.0, 300};
    const EchoSeries one = rate_function(at, 3.0, 1.0, times, {{}, 1});
    const EchoSeries three = rate_function(at, 3.0, 1.0, times, {{}, 3});
    CHECK(one.log_echo == three.log_echo);
  }
  SUBCASE("log echo is non-positive and starts at zero") {
    const EchoSeries s = rate_function(p, 2.0, 0.7, times);
    CHECK(s.log_echo[0] == 0.0);
    for (double x : s.log_echo) CHECK(x <= 1e-14);
    CHECK(s.params.h == 0.7);
  }
}

TEST_CASE("cross-phase quench rises and saturates, same-phase quench stays small") {
  ModelParams p{ModelKind::IXY, 1.0, 0.0, 0.0, 0.0, 1.0, 1200};
  const std::vector<double> times = TimeGrid{50.0, 0.05}.points();
  const auto cross = rate_from_echo(rate_function(p, 2.0, 1.0, times));
  const auto same = rate_from_echo(rate_function(p, 2.0, 1.8, times));
  CHECK(cross[200] > cross[20]);  // t = 10 vs t = 1
  double late = 0.0;
  int count = 0;
  for (std::size_t k = 400; k < times.size(); ++k, ++count) late += cross[k];
  late /= count;
  CHECK(late > 0.1);
  CHECK(late < 1.0);
  CHECK(*std::max_element(same.begin(), same.end()) < 0.1 * late);
}
