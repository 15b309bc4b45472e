#include "rtquench/quench_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rtquench/parallel.hpp"

namespace rtq {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t grid_index(const std::vector<double>& times, double t, const char* name) {
  const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9 * std::max(1.0, t));
  if (it == times.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    std::ostringstream os;
    os << "averaging window bound " << name << "=" << t << " is not on the time grid";
    throw ParameterError(os.str());
  }
  return static_cast<std::size_t>(it - times.begin());
}

double mean_rate(const EchoSeries& series, double a, double b) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    const double t = series.times[k];
    if (t >= a - 1e-9 && t <= b + 1e-9) {
      sum += series.log_echo[k];
      ++count;
    }
  }
  return count == 0 ? kNaN : -sum / static_cast<double>(count) / series.n_sites;
}

std::string error_kind(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const PhaseError&) {
    return "phase";
  } catch (const ParameterError&) {
    return "parameter";
  } catch (const DimensionError&) {
    return "parameter";
  } catch (const Error&) {
    return "numerical";
  }
}

}  // namespace

std::vector<double> rate_from_echo(const EchoSeries& series) {
  if (series.n_sites <= 0) throw ParameterError("rate_from_echo: n_sites must be positive");
  std::vector<double> out(series.log_echo.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.0 - series.log_echo[k] / series.n_sites;
  return out;
}

void AveragingWindow::validate() const {
  if (!(tau0 > 0.0 && tau0 <= tau1 && tau1 < tau) || !std::isfinite(tau)) {
    throw ParameterError("window must satisfy 0 < tau0 <= tau1 < tau");
  }
}

double eta_average(const EchoSeries& series, double a, double b) {
  if (series.n_sites <= 0) throw ParameterError("eta: n_sites must be positive");
  if (!(b > a)) throw ParameterError("eta: empty averaging interval");
  const std::size_t ia = grid_index(series.times, a, "start");
  const std::size_t ib = grid_index(series.times, b, "end");
  const auto& t = series.times;

  // log of the trapezoid weight times L at every node, then log-sum-exp.
  std::vector<double> terms;
  terms.reserve(ib - ia + 1);
  for (std::size_t k = ia; k <= ib; ++k) {
    const double left = (k > ia) ? t[k] - t[k - 1] : 0.0;
    const double right = (k < ib) ? t[k + 1] - t[k] : 0.0;
    terms.push_back(std::log((left + right) / 2.0) + series.log_echo[k]);
  }
  const double peak = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double x : terms) sum += std::exp(x - peak);
  const double log_mean = peak + std::log(sum) - std::log(t[ib] - t[ia]);
  return -log_mean / series.n_sites;
}

double eta_transient(const EchoSeries& series, const AveragingWindow& window) {
  window.validate();
  return eta_average(series, 0.0, window.tau0);
}

double eta_steady(const EchoSeries& series, const AveragingWindow& window) {
  window.validate();
  return eta_average(series, window.tau1, window.tau);
}

std::string_view to_string(SweepSolver solver) {
  switch (solver) {
    case SweepSolver::Auto: return "auto";
    case SweepSolver::Momentum: return "momentum";
    case SweepSolver::ExactDiag: return "exact_diag";
  }
  return "auto";
}

std::string_view to_string(EtaSignal signal) {
  return signal == EtaSignal::Steady ? "steady" : "transient";
}

std::string_view to_string(DetectMethod method) {
  return method == DetectMethod::Kink ? "kink" : "curvature_flip";
}

std::vector<double> central_derivative(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("central_derivative: size mismatch");
  std::vector<double> out;
  if (x.size() < 3) return out;
  out.reserve(x.size() - 2);
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    out.push_back((y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]));
  }
  return out;
}

std::vector<double> median3(std::span<const double> y) {
  std::vector<double> out(y.begin(), y.end());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    double w[3] = {y[i - 1], y[i], y[i + 1]};
    std::sort(std::begin(w), std::end(w));
    out[i] = w[1];
  }
  return out;
}

Detection detect_ep(std::span<const double> h1, std::span<const double> eta) {
  if (h1.size() != eta.size()) throw DimensionError("detect_ep: size mismatch");
  if (h1.size() < 5) throw ParameterError("detect_ep needs at least 5 grid points");
  for (std::size_t i = 1; i < h1.size(); ++i) {
    if (!(h1[i] > h1[i - 1])) throw ParameterError("detect_ep: h1 grid must increase");
  }
  for (double v : eta) {
    if (!std::isfinite(v)) throw NumericalError("detect_ep: non-finite eta value");
  }

  // Second divided differences at interior points, scaled by the local
  // spacing squared so that a uniform grid gives plain second differences.
  const std::size_t m = h1.size() - 2;
  std::vector<double> d2(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double hl = h1[i + 1] - h1[i];
    const double hr = h1[i + 2] - h1[i + 1];
    const double divided =
        2.0 * ((eta[i + 2] - eta[i + 1]) / hr - (eta[i + 1] - eta[i]) / hl) / (hl + hr);
    d2[i] = divided * hl * hr;
  }

  Detection out;
  std::vector<double> magnitude(m);
  std::transform(d2.begin(), d2.end(), magnitude.begin(), [](double v) { return std::abs(v); });
  const auto peak_it = std::max_element(magnitude.begin(), magnitude.end());
  const double peak = *peak_it;
  std::vector<double> sorted = magnitude;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m / 2),
                   sorted.end());
  double median = sorted[m / 2];
  if (m % 2 == 0) {
    median = (median + *std::max_element(sorted.begin(),
                                         sorted.begin() + static_cast<std::ptrdiff_t>(m / 2))) /
             2.0;
  }
  out.confidence = median > 0.0 ? peak / median
                                : (peak > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  out.inconclusive = !(out.confidence >= kMinConfidence);

  if (peak > 0.0) {
    out.kink = {true, h1[1 + static_cast<std::size_t>(peak_it - magnitude.begin())],
                DetectMethod::Kink};
  }

  const double significant = 0.01 * peak;
  std::ptrdiff_t upper = -1;
  for (auto i = static_cast<std::ptrdiff_t>(m) - 1; i >= 0 && peak > 0.0; --i) {
    const double v = d2[static_cast<std::size_t>(i)];
    if (std::abs(v) < significant) continue;
    if (upper >= 0 && std::signbit(v) != std::signbit(d2[static_cast<std::size_t>(upper)])) {
      const double lo_h = h1[static_cast<std::size_t>(i) + 1];
      const double hi_h = h1[static_cast<std::size_t>(upper) + 1];
      const double lo_v = std::abs(v);
      const double hi_v = std::abs(d2[static_cast<std::size_t>(upper)]);
      out.curvature_flip = {true, lo_h + (hi_h - lo_h) * lo_v / (lo_v + hi_v),
                            DetectMethod::CurvatureFlip};
      break;
    }
    upper = i;
  }
  return out;
}

SweepSolver resolve_solver(ModelKind model, SweepSolver requested) {
  const bool analytic = model == ModelKind::IXY || model == ModelKind::IATXY;
  if (requested == SweepSolver::Auto) {
    return analytic ? SweepSolver::Momentum : SweepSolver::ExactDiag;
  }
  if (requested == SweepSolver::Momentum && !analytic) {
    throw ParameterError("solver = momentum is only available for IXY and IATXY");
  }
  return requested;
}

std::vector<double> field_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop)) {
    throw ParameterError("sweep grid needs finite bounds and step > 0");
  }
  if (stop < start) throw ParameterError("sweep grid is empty (stop < start)");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Rounded to 12 decimals so that grid values print as the user wrote them.
    out[i] = std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
  }
  return out;
}

EchoSeries quench_series(const ModelParams& params, double h0, double h1,
                         std::span<const double> times, SweepSolver solver,
                         const SweepOptions& options) {
  if (resolve_solver(params.model, solver) == SweepSolver::Momentum) {
    return rate_function(params, h0, h1, times, MomentumOptions{options.eig, options.threads});
  }
  EdOptions ed = options.ed;
  ed.eig = options.eig;
  return loschmidt_echo(make_quench_setup(params, h0, h1, times, ed));
}

SweepResult sweep(const ModelParams& params, double h0, std::span<const double> h1_grid,
                  const SweepOptions& options) {
  params.validate();
  options.window.validate();
  if (h1_grid.empty()) throw ParameterError("sweep grid is empty");
  for (std::size_t i = 1; i < h1_grid.size(); ++i) {
    if (!(h1_grid[i] > h1_grid[i - 1])) {
      throw ParameterError("sweep grid must be strictly increasing");
    }
  }
  SweepResult out;
  out.params = params;
  out.h0 = h0;
  out.solver = resolve_solver(params.model, options.solver);
  out.signal = options.signal;
  out.method = options.method;
  out.analytic_ep = analytic_ep(params);
  if (!(h0 > out.analytic_ep)) {
    std::ostringstream os;
    os << "initial field h0=" << h0 << " is not in the unbroken phase (h_ep="
       << out.analytic_ep << ")";
    throw PhaseError(os.str());
  }
  out.h1.assign(h1_grid.begin(), h1_grid.end());
  const std::size_t n = out.h1.size();
  out.eta_transient.assign(n, kNaN);
  out.eta_steady.assign(n, kNaN);
  out.lambda_sat.assign(n, kNaN);

  const TimeGrid grid{std::max(options.window.tau0, options.window.tau), options.dt};
  const std::vector<double> times = grid.points();

  SweepOptions inner = options;
  inner.threads = (n == 1) ? options.threads : 1;
  std::vector<std::exception_ptr> failures(n);
  parallel_for(n, n == 1 ? 1 : options.threads, [&](std::size_t i) {
    try {
      const EchoSeries series = quench_series(params, h0, out.h1[i], times, out.solver, inner);
      out.eta_transient[i] = eta_transient(series, options.window);
      out.eta_steady[i] = eta_steady(series, options.window);
      out.lambda_sat[i] = mean_rate(series, options.window.tau1, options.window.tau);
    } catch (const Error&) {
      failures[i] = std::current_exception();
      out.eta_transient[i] = out.eta_steady[i] = out.lambda_sat[i] = kNaN;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    std::string message;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      message = e.what();
    }
    out.errors.push_back({out.h1[i], error_kind(failures[i]), message});
  }

  const auto smooth = [&](const std::vector<double>& y) {
    return options.median_filter ? median3(y) : y;
  };
  out.d_eta_transient = central_derivative(out.h1, smooth(out.eta_transient));
  out.d_eta_steady = central_derivative(out.h1, smooth(out.eta_steady));

  std::vector<double> good_h;
  std::vector<double> good_eta;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = out.signal_values()[i];
    if (std::isfinite(v)) {
      good_h.push_back(out.h1[i]);
      good_eta.push_back(v);
    }
  }
  if (good_h.size() >= 5) out.detection = detect_ep(good_h, smooth(good_eta));
  return out;
}

}  // namespace rtq
