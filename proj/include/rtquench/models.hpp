#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rtquench/types.hpp"

namespace rtq {

enum class ModelKind { IXY, IATXY, IXYZ_SR, IXYZ_LR };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

// Couplings of an RT-symmetric spin-1/2 ring. All energies are in units of
// the exchange J = 1. Fields that do not belong to `model` must stay zero.
struct ModelParams {
  ModelKind model = ModelKind::IXY;
  double gamma = 0.0;  // imaginary anisotropy
  double delta = 0.0;  // zz coupling, iXYZ only
  double h = 0.0;      // uniform transverse field
  double h_a = 0.0;    // staggered field, iATXY only
  double alpha = 1.0;  // power-law decay, long-range iXYZ only
  int n_sites = 2;

  void validate() const;
  ModelParams with_field(double field) const;
};

// A two-site interaction term J_lm [(1+ig) XX + (1-ig) YY + delta ZZ] / 4.
// Sites are 0-based ring positions.
struct Bond {
  int site_a;
  int site_b;
  double coupling;
};

// Interaction graph of the ring: nearest neighbours with periodic wrap for
// the short-range models, every unordered pair with J / d^alpha (ring
// distance d) for the long-range model.
std::vector<Bond> bonds(const ModelParams& params);

// Coefficient of sigma^z_l for every site: -(h + (-1)^l h_a) / 2 with the
// physical site label l = index + 1.
std::vector<double> site_fields(const ModelParams& params);

inline constexpr int kMaxDenseSites = 14;

// Dense 2^N x 2^N Hamiltonian in the sigma^z product basis. Bit l of a basis
// index set means site l points down.
ComplexMatrix build_hamiltonian(const ModelParams& params, int max_sites = kMaxDenseSites);

// Closed-form exceptional field of the model at the given couplings.
double analytic_ep(const ModelParams& params);

// Frobenius norm of R conj(H) R^{-1} - H with R = exp(-i pi/4 sum_j sigma^z_j).
double rt_symmetry_residual(const ComplexMatrix& H, int n_sites);

}  // namespace rtq
