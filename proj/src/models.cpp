#include "rtquench/models.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace rtq {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::IXY: return "IXY";
    case ModelKind::IATXY: return "IATXY";
    case ModelKind::IXYZ_SR: return "IXYZ_SR";
    case ModelKind::IXYZ_LR: return "IXYZ_LR";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "IXY") return ModelKind::IXY;
  if (name == "IATXY") return ModelKind::IATXY;
  if (name == "IXYZ_SR") return ModelKind::IXYZ_SR;
  if (name == "IXYZ_LR") return ModelKind::IXYZ_LR;
  throw ParameterError("unknown model '" + std::string(name) +
                       "' (expected IXY, IATXY, IXYZ_SR or IXYZ_LR)");
}

void ModelParams::validate() const {
  const auto fail = [this](const std::string& what) {
    throw ParameterError(std::string(to_string(model)) + ": " + what);
  };
  if (n_sites < 2) fail("n_sites must be >= 2");
  for (double v : {gamma, delta, h, h_a, alpha}) {
    if (!std::isfinite(v)) fail("couplings must be finite");
  }
  if (model != ModelKind::IATXY && h_a != 0.0) fail("h_a is only defined for IATXY");
  if ((model == ModelKind::IXY || model == ModelKind::IATXY) && delta != 0.0) {
    fail("delta is only defined for the iXYZ models");
  }
  if (model == ModelKind::IATXY && n_sites % 2 != 0) {
    fail("n_sites must be even for the staggered field");
  }
  if (model == ModelKind::IXYZ_LR && !(alpha > 0.0)) fail("alpha must be > 0");
}

ModelParams ModelParams::with_field(double field) const {
  ModelParams out = *this;
  out.h = field;
  return out;
}

std::vector<Bond> bonds(const ModelParams& params) {
  const int n = params.n_sites;
  std::vector<Bond> out;
  if (params.model == ModelKind::IXYZ_LR) {
    for (int l = 0; l < n; ++l) {
      for (int m = l + 1; m < n; ++m) {
        const int d = std::min(m - l, n - (m - l));
        out.push_back({l, m, std::pow(static_cast<double>(d), -params.alpha)});
      }
    }
  } else {
    for (int l = 0; l < n; ++l) out.push_back({l, (l + 1) % n, 1.0});
  }
  return out;
}

std::vector<double> site_fields(const ModelParams& params) {
  std::vector<double> out(static_cast<std::size_t>(params.n_sites));
  for (int i = 0; i < params.n_sites; ++i) {
    const int label = i + 1;
    const double stagger = (label % 2 == 1) ? -params.h_a : params.h_a;
    out[static_cast<std::size_t>(i)] = -(params.h + stagger) / 2.0;
  }
  return out;
}

ComplexMatrix build_hamiltonian(const ModelParams& params, int max_sites) {
  params.validate();
  if (params.n_sites > max_sites) {
    throw DimensionError("n_sites = " + std::to_string(params.n_sites) +
                         " exceeds the dense guard of " + std::to_string(max_sites));
  }
  const auto dim = std::uint64_t{1} << params.n_sites;
  const auto bond_list = bonds(params);
  const auto fields = site_fields(params);
  const Complex pair_amp{0.0, params.gamma / 2.0};

  ComplexMatrix H = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim),
                                        static_cast<Eigen::Index>(dim));
  for (std::uint64_t s = 0; s < dim; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    double diag = 0.0;
    for (const Bond& b : bond_list) {
      const bool down_a = (s >> b.site_a) & 1U;
      const bool down_b = (s >> b.site_b) & 1U;
      const double zz = (down_a == down_b) ? 1.0 : -1.0;
      diag += b.coupling * params.delta / 4.0 * zz;
      const auto flipped = static_cast<Eigen::Index>(
          s ^ (std::uint64_t{1} << b.site_a) ^ (std::uint64_t{1} << b.site_b));
      // XX + YY moves a flip across the bond, XX - YY creates or removes a pair.
      H(flipped, col) += (down_a != down_b) ? Complex{b.coupling / 2.0, 0.0}
                                            : b.coupling * pair_amp;
    }
    for (int l = 0; l < params.n_sites; ++l) {
      const double z = ((s >> l) & 1U) ? -1.0 : 1.0;
      diag += fields[static_cast<std::size_t>(l)] * z;
    }
    H(col, col) += diag;
  }
  return H;
}

double analytic_ep(const ModelParams& params) {
  params.validate();
  const double g2 = params.gamma * params.gamma;
  switch (params.model) {
    case ModelKind::IXY: return std::sqrt(1.0 + g2);
    case ModelKind::IATXY: return std::sqrt(1.0 + params.h_a * params.h_a + g2);
    case ModelKind::IXYZ_SR: return std::hypot(1.0 + params.delta, params.gamma);
    case ModelKind::IXYZ_LR: {
      double harmonic = 0.0;
      for (int j = 1; j <= params.n_sites / 2; ++j) {
        harmonic += std::pow(static_cast<double>(j), -params.alpha);
      }
      return std::hypot(1.0 + params.delta, params.gamma) * harmonic;
    }
  }
  return 0.0;
}

double rt_symmetry_residual(const ComplexMatrix& H, int n_sites) {
  if (n_sites < 1 || n_sites > 30) throw DimensionError("n_sites out of range");
  const auto dim = Eigen::Index{1} << n_sites;
  if (H.rows() != dim || H.cols() != dim) {
    throw DimensionError("matrix dimension does not match 2^n_sites");
  }
  // R is diagonal with phase exp(-i pi/4 * sum_j z_j) on each basis state.
  std::vector<Complex> phase(static_cast<std::size_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) {
    const int down = std::popcount(static_cast<std::uint64_t>(s));
    const int magnetisation = n_sites - 2 * down;
    phase[static_cast<std::size_t>(s)] =
        std::polar(1.0, -std::numbers::pi / 4.0 * magnetisation);
  }
  double sum = 0.0;
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const Complex mapped = phase[static_cast<std::size_t>(r)] * std::conj(H(r, c)) *
                             std::conj(phase[static_cast<std::size_t>(c)]);
      sum += std::norm(mapped - H(r, c));
    }
  }
  return std::sqrt(sum);
}

}  // namespace rtq
