#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rtquench/dense_linalg.hpp"
#include "rtquench/echo_series.hpp"
#include "rtquench/models.hpp"

namespace rtq {

// Hilbert space used for the full-chain quench. `Sector` keeps only states
// with zero lattice momentum and an even number of down spins, which contains
// the all-up state and every state it reaches under the Hamiltonian. `Full`
// is the complete 2^N product basis.
enum class EdBasis { Sector, Full };

enum class EvolutionPath { Auto, Spectral, Propagator };

struct EdOptions {
  EdBasis basis = EdBasis::Sector;
  EvolutionPath path = EvolutionPath::Auto;
  int max_sites = 12;  // raisable to kMaxDenseSites
  EigOptions eig;
  double reality_tol = 1e-8;  // relative to max(1, ||H||_F)
};

// Translation representatives (smallest rotation of each orbit) with an even
// number of down spins.
struct MomentumSector {
  int n_sites = 0;
  std::vector<std::uint32_t> reps;
  std::vector<int> orbit_size;
  std::vector<std::int32_t> rep_index;  // basis state -> representative row

  std::size_t dim() const { return reps.size(); }
};

MomentumSector momentum_sector(int n_sites);

// True when the couplings are translation invariant (no staggered field).
bool sector_supported(const ModelParams& params);

// Hamiltonian restricted to the k = 0, even-parity sector in the normalised
// orbit basis |r> = n_r^{-1/2} sum_j T^j |s_r>.
ComplexMatrix build_sector_hamiltonian(const ModelParams& params, int max_sites);

// Dispatches to the sector or full builder.
ComplexMatrix ed_hamiltonian(const ModelParams& params, const EdOptions& options);

enum class Reality { Unbroken, Broken };

struct RealityReport {
  Reality classification = Reality::Unbroken;
  double max_imag = 0.0;
  double tolerance = 0.0;
};

// UNBROKEN iff max |Im lambda| < tol * max(1, ||H||_F).
RealityReport spectrum_reality(const ComplexMatrix& H, double tol = 1e-8);

struct GroundState {
  StateVector vector;  // unit Euclidean norm
  double energy = 0.0;
  Eigen::Index index = 0;  // column in spectrum.vectors
  Spectrum spectrum;
};

// Eigenvector of the lowest eigenvalue. Throws PhaseError when the spectrum
// is not real within tol * max(1, ||H||_F) and DefectiveSpectrumError if the
// eigenbasis cannot be inverted.
GroundState ground_state(const ComplexMatrix& H, const EigOptions& eig = {}, double tol = 1e-8);

struct QuenchSetup {
  ModelParams initial;  // h = h0
  ModelParams quench;   // h = h1
  ComplexMatrix initial_hamiltonian;
  ComplexMatrix quench_hamiltonian;
  GroundState ground;
  Spectrum quench_spectrum;
  double growth = 0.0;  // max Im of the quench spectrum, removed from amplitudes
  std::vector<double> times;
  EvolutionPath path = EvolutionPath::Spectral;  // resolved, never Auto
};

// Validates that h0 lies in the unbroken phase, builds both Hamiltonians and
// resolves the evolution path from the quench spectrum's defectiveness.
QuenchSetup make_quench_setup(const ModelParams& params, double h0, double h1,
                              std::span<const double> times, const EdOptions& options = {});

// ln L(t_k) with overlaps taken after the Dyson map P0^{-1} of the initial
// Hamiltonian.
EchoSeries loschmidt_echo(const QuenchSetup& setup);

// The same echo computed with Theta-weighted overlaps in the original basis,
// Theta = (P0^{-1})^dagger P0^{-1}. Used to cross-check the frame.
double theta_weighted_echo(const QuenchSetup& setup, double t);

}  // namespace rtq
