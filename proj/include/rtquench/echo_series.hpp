#pragma once

#include <cstddef>
#include <vector>

#include "rtquench/models.hpp"

namespace rtq {

// Uniform time grid t_k = k * dt, k = 0..steps.
struct TimeGrid {
  double t_max = 50.0;
  double dt = 0.05;

  std::size_t steps() const;
  std::vector<double> points() const;
  void validate() const;
};

// Loschmidt echo of one quench h0 -> h1, stored as ln L(t_k) so that
// exponentially small echoes of large systems stay representable.
struct EchoSeries {
  ModelParams params;  // post-quench couplings; params.h == h1
  double h0 = 0.0;
  double h1 = 0.0;
  int n_sites = 0;  // normalisation of intensive quantities
  std::vector<double> times;
  std::vector<double> log_echo;

  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

}  // namespace rtq
