#include "rtquench/momentum_solver.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "rtquench/parallel.hpp"

namespace rtq {
namespace {

constexpr double kDegenerateInitial = 1e-12;
constexpr double kDefectiveQuench = 1e-7;
constexpr std::size_t kModeChunk = 64;

// Re-raises the in-flight exception with `context` prepended, keeping its type.
[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const PhaseError& e) {
    throw PhaseError(context + e.what());
  } catch (const DefectiveSpectrumError& e) {
    throw DefectiveSpectrumError(context + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + e.what());
  } catch (const ParameterError& e) {
    throw ParameterError(context + e.what());
  } catch (const Error& e) {
    throw Error(context + e.what());
  }
}

std::string mode_label(double phi) {
  std::ostringstream os;
  os.precision(17);
  os << "mode phi=" << phi << ": ";
  return os.str();
}

}  // namespace

MomentumGrid momentum_grid(ModelKind model, int n_sites) {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw ParameterError("momentum grid needs an even n_sites >= 2");
  }
  MomentumGrid grid{model, {}};
  const int modes = n_sites / 2;
  grid.angles.reserve(static_cast<std::size_t>(modes));
  switch (model) {
    case ModelKind::IXY:
      for (int p = 1; p <= modes; ++p) {
        grid.angles.push_back(2.0 * std::numbers::pi * p / n_sites);
      }
      break;
    case ModelKind::IATXY:
      for (int j = 0; j < modes; ++j) {
        grid.angles.push_back(-std::numbers::pi / 2.0 + std::numbers::pi * j / modes);
      }
      break;
    default:
      throw ParameterError("momentum grids exist only for IXY and IATXY");
  }
  return grid;
}

ComplexMatrix ixy_block(double h, double gamma, double phi) {
  const double c = std::cos(phi);
  const double s = gamma * std::sin(phi);
  ComplexMatrix block(2, 2);
  block << h - c, -s,
           s, c - h;
  return block;
}

Complex ixy_dispersion(double h, double gamma, double phi) {
  const double a = h - std::cos(phi);
  const double s = gamma * std::sin(phi);
  return std::sqrt(Complex{a * a - s * s, 0.0});
}

ComplexMatrix iatxy_block(double h, double h_a, double gamma, double phi) {
  const double c = std::cos(phi);
  const double s = gamma * std::sin(phi);
  ComplexMatrix block(4, 4);
  block << h + c, -s, 0.0, -h_a,
           s, -h - c, h_a, 0.0,
           0.0, h_a, c - h, -s,
           -h_a, 0.0, s, h - c;
  return block;
}

std::array<Complex, 4> iatxy_eigenvalues(double h, double h_a, double gamma, double phi) {
  const double c = std::cos(phi);
  const double s = gamma * std::sin(phi);
  const double x = h * h + h_a * h_a + c * c - s * s;
  const Complex root =
      std::sqrt(Complex{h * h * h_a * h_a + h * h * c * c - h_a * h_a * s * s, 0.0});
  const Complex inner_minus = std::sqrt(x - 2.0 * root);
  const Complex inner_plus = std::sqrt(x + 2.0 * root);
  return {-inner_minus, inner_minus, -inner_plus, inner_plus};
}

ComplexMatrix ModeQuench::quench_block() const {
  ComplexMatrix block(2, 2);
  block << -delta, omega,
           -omega, delta;
  return block / eps0;
}

ModeQuench make_mode_quench(double h0, double h1, double gamma, double phi) {
  ModeQuench mq;
  mq.phi = phi;
  mq.h0 = h0;
  mq.h1 = h1;
  mq.gamma = gamma;
  mq.eps0 = ixy_dispersion(h0, gamma, phi);
  mq.eps1 = ixy_dispersion(h1, gamma, phi);
  if (mq.eps0.imag() != 0.0) {
    throw PhaseError(mode_label(phi) + "initial block is in the broken phase");
  }
  if (std::abs(mq.eps0) < kDegenerateInitial) {
    throw NumericalError(mode_label(phi) + "initial block is degenerate (|eps0| < 1e-12)");
  }
  const double c = std::cos(phi);
  const double s = gamma * std::sin(phi);
  mq.delta = (h0 - c) * (h1 - c) - s * s;
  mq.omega = gamma * (h1 - h0) * std::sin(phi);

  const ComplexMatrix block = mq.quench_block();
  mq.defective = std::abs(mq.eps1) < kDefectiveQuench && block.norm() > 0.0;
  if (mq.defective) {
    Eigen::Vector2cd head(mq.omega, mq.delta);
    head.normalize();
    const Eigen::Vector2cd tail(-std::conj(head[1]), std::conj(head[0]));
    mq.c1 = std::conj(head[0]);
    mq.c2 = std::conj(tail[0]);
    return mq;
  }
  const Spectrum spec = eig_complex(block);
  Eigen::Vector2cd coeffs = spec.inverse.col(0);  // S^{-1} (1, 0)
  coeffs.normalize();
  mq.c1 = coeffs[0];
  mq.c2 = coeffs[1];
  return mq;
}

namespace {

struct Amplitudes {
  double a2;
  double b2;
};

// a_p, b_p multiplied by exp(-|Im eps1 t|).
Amplitudes scaled_amplitudes(const ModeQuench& mq, double t) {
  const Complex z = mq.eps1 * t;
  const double x = z.real();
  const double y = z.imag();
  const double shift = std::abs(y);
  const Complex forward = std::exp(-y - shift) * std::polar(1.0, x);
  const Complex backward = std::exp(y - shift) * std::polar(1.0, -x);
  const Complex cos_s = (forward + backward) / 2.0;
  Complex sinc_s;
  if (std::abs(z) < 1e-4) {
    sinc_s = t * (1.0 - z * z / 6.0) * std::exp(-shift);
  } else {
    sinc_s = (forward - backward) / (2.0 * kI) / mq.eps1;
  }
  const Complex a = cos_s - kI * mq.delta * sinc_s / mq.eps0;
  const Complex b = kI * mq.omega * sinc_s / mq.eps0;
  return {std::norm(a), std::norm(b)};
}

}  // namespace

double ixy_mode_echo(const ModeQuench& mq, double t) {
  const auto [a2, b2] = scaled_amplitudes(mq, t);
  return a2 / (a2 + b2);
}

double ixy_mode_log_echo(const ModeQuench& mq, double t) {
  const auto [a2, b2] = scaled_amplitudes(mq, t);
  return std::log(a2) - std::log(a2 + b2);
}

IatxyModeQuench::IatxyModeQuench(double h0, double h1, double h_a, double gamma, double phi,
                                 const EigOptions& options)
    : phi_(phi), quench_block_(iatxy_block(h1, h_a, gamma, phi)) {
  const ComplexMatrix initial = iatxy_block(h0, h_a, gamma, phi);
  const Spectrum spec0 = eig_complex(initial, options);
  if (spec0.defective) {
    throw DefectiveSpectrumError(mode_label(phi) + "initial 4x4 block is defective");
  }
  if (spec0.max_abs_imag() > 1e-8 * std::max(1.0, initial.norm())) {
    throw PhaseError(mode_label(phi) + "initial 4x4 block has complex eigenvalues");
  }
  // Lowest real part first; ties resolved by eig_complex's ordering.
  ground_ = spec0.vectors.col(0);
  initial_inverse_ = spec0.inverse;

  quench_ = eig_complex(quench_block_, options);
  growth_ = quench_.eigenvalues.imag().maxCoeff();
  if (!quench_.defective) {
    frame_change_ = initial_inverse_ * quench_.vectors;
    quench_coeffs_ = quench_.inverse * ground_;
  }
}

double IatxyModeQuench::log_echo(double t) const {
  Eigen::Vector4cd mapped;
  if (!quench_.defective) {
    Eigen::Vector4cd phases;
    for (Eigen::Index k = 0; k < 4; ++k) {
      const Complex lambda = quench_.eigenvalues[k];
      phases[k] = quench_coeffs_[k] * std::exp(Complex{(lambda.imag() - growth_) * t,
                                                       -lambda.real() * t});
    }
    mapped = frame_change_ * phases;
  } else {
    const ComplexMatrix shifted =
        quench_block_ - kI * growth_ * ComplexMatrix::Identity(4, 4);
    mapped = initial_inverse_ * (matexp_reference(shifted, t) * ground_);
  }
  return std::log(std::norm(mapped[0])) - std::log(mapped.squaredNorm());
}

double IatxyModeQuench::echo(double t) const { return std::exp(log_echo(t)); }

double iatxy_mode_echo(double h0, double h1, double h_a, double gamma, double phi, double t) {
  return IatxyModeQuench(h0, h1, h_a, gamma, phi).echo(t);
}

EchoSeries rate_function(const ModelParams& params, double h0, double h1,
                         std::span<const double> times, const MomentumOptions& options) {
  params.validate();
  if (params.model != ModelKind::IXY && params.model != ModelKind::IATXY) {
    throw ParameterError("the momentum solver handles IXY and IATXY only");
  }
  const double ep = analytic_ep(params);
  if (!(h0 > ep)) {
    std::ostringstream os;
    os << "initial field h0=" << h0 << " is not in the unbroken phase (h_ep=" << ep << ")";
    throw PhaseError(os.str());
  }
  const MomentumGrid grid = momentum_grid(params.model, params.n_sites);

  EchoSeries out;
  out.params = params.with_field(h1);
  out.h0 = h0;
  out.h1 = h1;
  out.n_sites = params.n_sites;
  out.times.assign(times.begin(), times.end());
  out.log_echo.assign(times.size(), 0.0);

  const auto mode_series = [&](double phi, std::vector<double>& series) {
    series.resize(times.size());
    try {
      if (params.model == ModelKind::IXY) {
        const ModeQuench mq = make_mode_quench(h0, h1, params.gamma, phi);
        for (std::size_t k = 0; k < times.size(); ++k) series[k] = ixy_mode_log_echo(mq, times[k]);
      } else {
        const IatxyModeQuench mq(h0, h1, params.h_a, params.gamma, phi, options.eig);
        for (std::size_t k = 0; k < times.size(); ++k) series[k] = mq.log_echo(times[k]);
      }
    } catch (const Error&) {
      rethrow_with_context(mode_label(phi));
    }
  };

  // Modes are evaluated in chunks (possibly concurrently) and reduced in
  // ascending phi order, so the sum is bit-identical for any thread count.
  std::vector<std::vector<double>> chunk(kModeChunk);
  for (std::size_t first = 0; first < grid.n_modes(); first += kModeChunk) {
    const std::size_t count = std::min(kModeChunk, grid.n_modes() - first);
    parallel_for(count, options.threads,
                 [&](std::size_t i) { mode_series(grid.angles[first + i], chunk[i]); });
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t k = 0; k < times.size(); ++k) out.log_echo[k] += chunk[i][k];
    }
  }
  return out;
}

}  // namespace rtq
