#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rtquench/quench_analysis.hpp"

namespace rtq::cli {

using Json = nlohmann::json;

// Invalid configuration document; the message names the offending field.
class ConfigError : public ParameterError {
public:
  using ParameterError::ParameterError;
};

struct SweepSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.05;
};

struct ExperimentConfig {
  Json resolved;  // full document with defaults filled in
  ModelParams params;
  double h0 = 0.0;
  double h_spectrum = 0.0;
  std::vector<double> h1;  // quench targets
  SweepSpec sweep;
  TimeGrid time;
  AveragingWindow window;
  SweepSolver solver = SweepSolver::Auto;
  EtaSignal signal = EtaSignal::Steady;
  DetectMethod method = DetectMethod::Kink;
  bool median_filter = false;
  EdOptions ed;
  EigOptions eig;
  double reality_tol = 1e-8;
  std::string out_dir = "out";
  std::string format = "csv";
  int threads = 1;

  SweepOptions sweep_options() const;
};

// Defaults for one model; every value is the one used in the corresponding
// figure of the reference study.
Json default_config(ModelKind model);

// Sets a dot-path key ("params.gamma=0.5"). The value is parsed as JSON when
// possible and kept as a string otherwise.
void apply_override(Json& doc, std::string_view assignment);

// Merges `user` over the defaults of its model, rejects unknown keys and
// converts the result into typed settings.
ExperimentConfig resolve_config(const Json& user);

Json load_config_file(const std::string& path);

}  // namespace rtq::cli
