#include "rtquench/echo_series.hpp"

#include <cmath>

namespace rtq {

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("time.dt must be positive");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw ParameterError("time.t_max must be non-negative");
  }
  const double ratio = t_max / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw ParameterError("time.t_max must be an integer multiple of time.dt");
  }
  if (ratio > 1e8) throw ParameterError("time grid has more than 1e8 steps");
}

std::size_t TimeGrid::steps() const {
  validate();
  return static_cast<std::size_t>(std::llround(t_max / dt));
}

std::vector<double> TimeGrid::points() const {
  const std::size_t n = steps();
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = static_cast<double>(k) * dt;
  return out;
}

}  // namespace rtq
