#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtquench/echo_series.hpp"
#include "rtquench/exact_diag.hpp"
#include "rtquench/momentum_solver.hpp"

namespace rtq {

// lambda(t_k) = -ln L(t_k) / N.
std::vector<double> rate_from_echo(const EchoSeries& series);

// Transient window [0, tau0] and steady window [tau1, tau].
struct AveragingWindow {
  double tau0 = 10.0;
  double tau1 = 20.0;
  double tau = 200.0;

  void validate() const;
};

// -(1/N) ln( (1/(b-a)) int_a^b L dt ), trapezoidal rule accumulated in log
// space. Both ends must be grid points (to 1e-9 relative); throws
// ParameterError otherwise.
double eta_average(const EchoSeries& series, double a, double b);
double eta_transient(const EchoSeries& series, const AveragingWindow& window);
double eta_steady(const EchoSeries& series, const AveragingWindow& window);

enum class SweepSolver { Auto, Momentum, ExactDiag };
enum class EtaSignal { Transient, Steady };
enum class DetectMethod { Kink, CurvatureFlip };

std::string_view to_string(SweepSolver solver);
std::string_view to_string(EtaSignal signal);
std::string_view to_string(DetectMethod method);

struct EpEstimate {
  bool found = false;
  double h_ep = 0.0;
  DetectMethod method = DetectMethod::Kink;
};

// Both detector signals on one eta(h1) curve. confidence is the peak |second
// difference| over its median; below 3 the detection is inconclusive.
struct Detection {
  EpEstimate kink;
  EpEstimate curvature_flip;
  double confidence = 0.0;
  bool inconclusive = true;

  const EpEstimate& pick(DetectMethod method) const {
    return method == DetectMethod::Kink ? kink : curvature_flip;
  }
};

inline constexpr double kMinConfidence = 3.0;

// Kink: h1 maximising |second difference|. Curvature flip: scanning down from
// the largest h1, the first sign change between two significant second
// differences (|d2| >= 1% of the peak), located by linear interpolation.
// Needs at least five strictly increasing points; second differences are
// divided differences, so non-uniform grids are allowed.
Detection detect_ep(std::span<const double> h1, std::span<const double> eta);

// Central differences at the interior points (length n - 2, empty for n < 3).
std::vector<double> central_derivative(std::span<const double> x, std::span<const double> y);

// Three-point running median; endpoints are kept.
std::vector<double> median3(std::span<const double> y);

struct SweepOptions {
  SweepSolver solver = SweepSolver::Auto;
  double dt = 0.05;
  AveragingWindow window;
  EtaSignal signal = EtaSignal::Steady;
  DetectMethod method = DetectMethod::Kink;
  bool median_filter = false;
  int threads = 1;
  EigOptions eig;
  EdOptions ed;
};

struct SweepError {
  double h1 = 0.0;
  std::string kind;  // "phase", "numerical", "parameter"
  std::string message;
};

struct SweepResult {
  ModelParams params;
  double h0 = 0.0;
  SweepSolver solver = SweepSolver::Momentum;
  EtaSignal signal = EtaSignal::Steady;
  std::vector<double> h1;
  std::vector<double> eta_transient;  // NaN where the point failed
  std::vector<double> eta_steady;
  std::vector<double> lambda_sat;     // mean of lambda(t) over [tau1, tau]
  std::vector<double> d_eta_transient;  // at h1[1..n-2]
  std::vector<double> d_eta_steady;
  std::vector<SweepError> errors;
  std::optional<Detection> detection;  // absent with fewer than 5 good points
  DetectMethod method = DetectMethod::Kink;
  double analytic_ep = 0.0;

  std::size_t succeeded() const { return h1.size() - errors.size(); }
  const std::vector<double>& signal_values() const {
    return signal == EtaSignal::Steady ? eta_steady : eta_transient;
  }
};

SweepSolver resolve_solver(ModelKind model, SweepSolver requested);

// Inclusive arithmetic grid start, start + step, ... up to stop (+1e-9 step).
std::vector<double> field_grid(double start, double stop, double step);

// One quench evaluated on [0, max(tau0, tau)] with the chosen solver.
EchoSeries quench_series(const ModelParams& params, double h0, double h1,
                         std::span<const double> times, SweepSolver solver,
                         const SweepOptions& options);

SweepResult sweep(const ModelParams& params, double h0, std::span<const double> h1_grid,
                  const SweepOptions& options);

}  // namespace rtq
