#include "rtquench/exact_diag.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <string>

namespace rtq {
namespace {

constexpr Eigen::Index kTimeChunk = 256;

void check_site_guard(int n_sites, int max_sites) {
  if (max_sites > kMaxDenseSites) {
    throw ParameterError("ed.max_sites cannot exceed " + std::to_string(kMaxDenseSites));
  }
  if (n_sites > max_sites) {
    throw DimensionError("n_sites = " + std::to_string(n_sites) + " exceeds ed.max_sites = " +
                         std::to_string(max_sites));
  }
}

std::uint32_t rotate(std::uint32_t s, int n) {
  const std::uint32_t mask = (n == 32) ? ~0U : ((1U << n) - 1U);
  return ((s << 1) | (s >> (n - 1))) & mask;
}

double scale_of(const ComplexMatrix& H) { return std::max(1.0, H.norm()); }

}  // namespace

MomentumSector momentum_sector(int n_sites) {
  if (n_sites < 2 || n_sites > kMaxDenseSites) {
    throw DimensionError("momentum sector needs 2 <= n_sites <= " +
                         std::to_string(kMaxDenseSites));
  }
  MomentumSector sector;
  sector.n_sites = n_sites;
  const std::uint32_t dim = 1U << n_sites;
  sector.rep_index.assign(dim, -1);
  for (std::uint32_t s = 0; s < dim; ++s) {
    if (std::popcount(s) % 2 != 0 || sector.rep_index[s] >= 0) continue;
    // s is the smallest member of its orbit because smaller states were seen first.
    const auto row = static_cast<std::int32_t>(sector.reps.size());
    int size = 0;
    std::uint32_t x = s;
    do {
      sector.rep_index[x] = row;
      x = rotate(x, n_sites);
      ++size;
    } while (x != s);
    sector.reps.push_back(s);
    sector.orbit_size.push_back(size);
  }
  return sector;
}

bool sector_supported(const ModelParams& params) { return params.h_a == 0.0; }

ComplexMatrix build_sector_hamiltonian(const ModelParams& params, int max_sites) {
  params.validate();
  check_site_guard(params.n_sites, max_sites);
  if (!sector_supported(params)) {
    throw ParameterError("ed.basis = sector needs translation-invariant couplings (h_a = 0)");
  }
  const MomentumSector sector = momentum_sector(params.n_sites);
  const auto bond_list = bonds(params);
  const auto fields = site_fields(params);
  const Complex pair_amp{0.0, params.gamma / 2.0};
  const auto dim = static_cast<Eigen::Index>(sector.dim());

  ComplexMatrix H = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint32_t s = sector.reps[static_cast<std::size_t>(col)];
    const double n_col = sector.orbit_size[static_cast<std::size_t>(col)];
    double diag = 0.0;
    for (const Bond& b : bond_list) {
      const bool down_a = (s >> b.site_a) & 1U;
      const bool down_b = (s >> b.site_b) & 1U;
      diag += b.coupling * params.delta / 4.0 * ((down_a == down_b) ? 1.0 : -1.0);
      const std::uint32_t flipped = s ^ (1U << b.site_a) ^ (1U << b.site_b);
      const auto row = static_cast<Eigen::Index>(sector.rep_index[flipped]);
      const double n_row = sector.orbit_size[static_cast<std::size_t>(row)];
      const Complex amp =
          (down_a != down_b) ? Complex{b.coupling / 2.0, 0.0} : b.coupling * pair_amp;
      H(row, col) += std::sqrt(n_col / n_row) * amp;
    }
    for (int l = 0; l < params.n_sites; ++l) {
      diag += fields[static_cast<std::size_t>(l)] * (((s >> l) & 1U) ? -1.0 : 1.0);
    }
    H(col, col) += diag;
  }
  return H;
}

ComplexMatrix ed_hamiltonian(const ModelParams& params, const EdOptions& options) {
  if (options.basis == EdBasis::Sector) {
    return build_sector_hamiltonian(params, options.max_sites);
  }
  check_site_guard(params.n_sites, options.max_sites);
  return build_hamiltonian(params, options.max_sites);
}

RealityReport spectrum_reality(const ComplexMatrix& H, double tol) {
  const StateVector values = eigenvalues_only(H);
  RealityReport report;
  report.max_imag = values.imag().cwiseAbs().maxCoeff();
  report.tolerance = tol * scale_of(H);
  report.classification =
      report.max_imag < report.tolerance ? Reality::Unbroken : Reality::Broken;
  return report;
}

GroundState ground_state(const ComplexMatrix& H, const EigOptions& eig, double tol) {
  GroundState out;
  out.spectrum = eig_complex(H, eig);
  const double max_imag = out.spectrum.max_abs_imag();
  if (!(max_imag < tol * scale_of(H))) {
    std::ostringstream os;
    os << "spectrum is not real (max |Im| = " << max_imag
       << "); the ground state is only defined in the unbroken phase";
    throw PhaseError(os.str());
  }
  if (out.spectrum.defective) {
    throw DefectiveSpectrumError("initial Hamiltonian has a non-invertible eigenbasis");
  }
  out.index = 0;
  out.energy = out.spectrum.eigenvalues[0].real();
  out.vector = out.spectrum.vectors.col(0);
  return out;
}

QuenchSetup make_quench_setup(const ModelParams& params, double h0, double h1,
                              std::span<const double> times, const EdOptions& options) {
  QuenchSetup setup;
  setup.initial = params.with_field(h0);
  setup.quench = params.with_field(h1);
  setup.initial.validate();
  setup.quench.validate();
  const double ep = analytic_ep(setup.initial);
  if (!(h0 > ep)) {
    std::ostringstream os;
    os << "initial field h0=" << h0 << " is not in the unbroken phase (h_ep=" << ep << ")";
    throw PhaseError(os.str());
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ParameterError("time grid must be increasing");
  }
  if (!times.empty() && times.front() < 0.0) throw ParameterError("times must be >= 0");
  setup.times.assign(times.begin(), times.end());

  setup.initial_hamiltonian = ed_hamiltonian(setup.initial, options);
  setup.quench_hamiltonian = ed_hamiltonian(setup.quench, options);
  setup.ground = ground_state(setup.initial_hamiltonian, options.eig, options.reality_tol);
  setup.quench_spectrum = eig_complex(setup.quench_hamiltonian, options.eig);
  setup.growth = std::max(0.0, setup.quench_spectrum.eigenvalues.imag().maxCoeff());

  switch (options.path) {
    case EvolutionPath::Auto:
      setup.path =
          setup.quench_spectrum.defective ? EvolutionPath::Propagator : EvolutionPath::Spectral;
      break;
    case EvolutionPath::Spectral:
      if (setup.quench_spectrum.defective) {
        throw DefectiveSpectrumError("spectral evolution requested for a defective quench");
      }
      setup.path = EvolutionPath::Spectral;
      break;
    case EvolutionPath::Propagator:
      setup.path = EvolutionPath::Propagator;
      break;
  }
  return setup;
}

namespace {

void spectral_echo(const QuenchSetup& setup, std::vector<double>& log_echo) {
  const Spectrum& p1 = setup.quench_spectrum;
  const ComplexMatrix& p0_inv = setup.ground.spectrum.inverse;
  const ComplexMatrix frame_change = p0_inv * p1.vectors;
  const StateVector coeffs = p1.inverse * setup.ground.vector;
  const Eigen::Index n = coeffs.size();
  const Eigen::Index g = setup.ground.index;
  const auto total = static_cast<Eigen::Index>(setup.times.size());

  ComplexMatrix phases(n, std::min(kTimeChunk, total));
  for (Eigen::Index first = 0; first < total; first += kTimeChunk) {
    const Eigen::Index count = std::min(kTimeChunk, total - first);
    phases.resize(n, count);
    for (Eigen::Index k = 0; k < count; ++k) {
      const double t = setup.times[static_cast<std::size_t>(first + k)];
      for (Eigen::Index j = 0; j < n; ++j) {
        const Complex lambda = p1.eigenvalues[j];
        phases(j, k) =
            coeffs[j] * std::exp(Complex{(lambda.imag() - setup.growth) * t, -lambda.real() * t});
      }
    }
    const ComplexMatrix mapped = frame_change * phases;
    for (Eigen::Index k = 0; k < count; ++k) {
      log_echo[static_cast<std::size_t>(first + k)] =
          std::log(std::norm(mapped(g, k))) - std::log(mapped.col(k).squaredNorm());
    }
  }
}

// Steps exp(-i (H1 - i kappa) dt) along the grid, renormalising each step.
// A non-uniform grid falls back to one exponential per interval.
void propagator_echo(const QuenchSetup& setup, std::vector<double>& log_echo) {
  const ComplexMatrix& p0_inv = setup.ground.spectrum.inverse;
  const Eigen::Index n = setup.quench_hamiltonian.rows();
  const ComplexMatrix shifted =
      setup.quench_hamiltonian - kI * setup.growth * ComplexMatrix::Identity(n, n);
  const Eigen::Index g = setup.ground.index;
  const auto& times = setup.times;

  StateVector psi = setup.ground.vector;
  double previous = 0.0;
  ComplexMatrix step;
  double step_dt = -1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double dt = times[k] - previous;
    if (dt > 0.0) {
      if (std::abs(dt - step_dt) > 1e-12 * std::max(1.0, times[k])) {
        step = matexp_reference(shifted, dt);
        step_dt = dt;
      }
      psi = step * psi;
      const double norm = psi.norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw NumericalError("propagated state lost its norm");
      }
      psi /= norm;
    }
    previous = times[k];
    const StateVector mapped = p0_inv * psi;
    log_echo[k] = std::log(std::norm(mapped[g])) - std::log(mapped.squaredNorm());
  }
}

}  // namespace

EchoSeries loschmidt_echo(const QuenchSetup& setup) {
  EchoSeries out;
  out.params = setup.quench;
  out.h0 = setup.initial.h;
  out.h1 = setup.quench.h;
  out.n_sites = setup.initial.n_sites;
  out.times = setup.times;
  out.log_echo.assign(setup.times.size(), 0.0);
  if (setup.path == EvolutionPath::Propagator) {
    propagator_echo(setup, out.log_echo);
  } else {
    spectral_echo(setup, out.log_echo);
  }
  // The propagator is the identity at t = 0, so the echo is exactly one there.
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    if (out.times[k] == 0.0) out.log_echo[k] = 0.0;
    if (!std::isfinite(out.log_echo[k])) {
      std::ostringstream os;
      os << "echo underflowed at t=" << out.times[k];
      throw NumericalError(os.str());
    }
  }
  return out;
}

double theta_weighted_echo(const QuenchSetup& setup, double t) {
  const Metric metric = biortho_metric(setup.ground.spectrum);
  const Eigen::Index n = setup.quench_hamiltonian.rows();
  StateVector psi_t;
  if (setup.path == EvolutionPath::Spectral) {
    psi_t = evolve(setup.quench_spectrum, setup.ground.vector, t) * std::exp(-setup.growth * t);
  } else {
    const ComplexMatrix shifted =
        setup.quench_hamiltonian - kI * setup.growth * ComplexMatrix::Identity(n, n);
    psi_t = matexp_reference(shifted, t) * setup.ground.vector;
  }
  const StateVector& psi0 = setup.ground.vector;
  const Complex overlap = metric_inner(metric, psi0, psi_t);
  const double norm0 = metric_inner(metric, psi0, psi0).real();
  const double norm_t = metric_inner(metric, psi_t, psi_t).real();
  return std::norm(overlap) / (norm0 * norm_t);
}

}  // namespace rtq
