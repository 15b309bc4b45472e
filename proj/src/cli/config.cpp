#include "rtquench/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rtq::cli {
namespace {

struct ModelDefaults {
  double gamma, delta, h_a, alpha;
  int n_sites;
  double h0, h1;
  double sweep_start, sweep_stop, sweep_step;
  double tau0, tau1, tau;
  double t_max;
  const char* signal;
  const char* method;
  const char* basis;
};

ModelDefaults defaults_for(ModelKind model) {
  switch (model) {
    case ModelKind::IXY:
      return {1.0, 0.0, 0.0, 1.0, 1200, 2.0, 1.0, 0.2, 2.5, 0.05,
              10.0, 20.0, 200.0, 50.0, "steady", "kink", "full"};
    case ModelKind::IATXY:
      return {1.0, 0.0, 0.5, 1.0, 100, 3.0, 1.0, 0.2, 2.5, 0.05,
              10.0, 100.0, 500.0, 50.0, "steady", "kink", "full"};
    case ModelKind::IXYZ_SR:
      return {0.25, 0.1, 0.0, 1.0, 12, 3.0, 0.7, 0.2, 2.5, 0.05,
              30.0, 30.0, 100.0, 50.0, "transient", "curvature_flip", "sector"};
    case ModelKind::IXYZ_LR:
      return {0.25, 0.2, 0.0, 1.0, 12, 5.0, 1.0, 1.0, 4.5, 0.1,
              800.0, 800.0, 1000.0, 800.0, "transient", "kink", "sector"};
  }
  throw ConfigError("model: unknown model");
}

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const Json& user, const Json& reference, const std::string& prefix) {
  for (const auto& [key, value] : user.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!reference.contains(key)) bad(path, "unknown key");
    if (value.is_null()) bad(path, "must not be null");
    const Json& ref = reference.at(key);
    if (ref.is_object()) {
      if (!value.is_object()) bad(path, "must be an object");
      check_keys(value, ref, path);
    }
  }
}

const Json& at_path(const Json& doc, const std::string& path) {
  const Json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) node = &node->at(part);
  return *node;
}

double number(const Json& doc, const std::string& path) {
  const Json& v = at_path(doc, path);
  if (!v.is_number()) bad(path, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "must be finite");
  return x;
}

double positive(const Json& doc, const std::string& path) {
  const double x = number(doc, path);
  if (!(x > 0.0)) bad(path, "must be > 0");
  return x;
}

int integer(const Json& doc, const std::string& path, int min_value) {
  const Json& v = at_path(doc, path);
  if (!v.is_number_integer()) bad(path, "must be an integer");
  const auto x = v.get<long long>();
  if (x < min_value || x > 1'000'000'000) {
    bad(path, "must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<int>(x);
}

std::string text(const Json& doc, const std::string& path) {
  const Json& v = at_path(doc, path);
  if (!v.is_string()) bad(path, "must be a string");
  return v.get<std::string>();
}

template <class Enum>
Enum choice(const Json& doc, const std::string& path,
            std::initializer_list<std::pair<const char*, Enum>> options) {
  const std::string value = text(doc, path);
  std::string allowed;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  bad(path, "must be one of " + allowed);
}

}  // namespace

SweepOptions ExperimentConfig::sweep_options() const {
  SweepOptions o;
  o.solver = solver;
  o.dt = time.dt;
  o.window = window;
  o.signal = signal;
  o.method = method;
  o.median_filter = median_filter;
  o.threads = threads;
  o.eig = eig;
  o.ed = ed;
  return o;
}

Json default_config(ModelKind model) {
  const ModelDefaults d = defaults_for(model);
  return Json{
      {"model", std::string(to_string(model))},
      {"params",
       {{"gamma", d.gamma}, {"delta", d.delta}, {"h_a", d.h_a}, {"alpha", d.alpha},
        {"n_sites", d.n_sites}}},
      {"h0", d.h0},
      {"h1", d.h1},
      {"h", d.h0},
      {"sweep", {{"start", d.sweep_start}, {"stop", d.sweep_stop}, {"step", d.sweep_step}}},
      {"time", {{"t_max", d.t_max}, {"dt", 0.05}}},
      {"window", {{"tau0", d.tau0}, {"tau1", d.tau1}, {"tau", d.tau}}},
      {"solver", "auto"},
      {"detect", {{"signal", d.signal}, {"method", d.method}, {"median_filter", false}}},
      {"ed", {{"basis", d.basis}, {"max_sites", 12}}},
      {"tolerances", {{"eig_residual", 1e-8}, {"condition", 1e10}, {"reality", 1e-8}}},
      {"output", {{"directory", "out"}, {"format", "csv"}}},
      {"threads", 1},
  };
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("--override expects key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  Json* node = &doc;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (parts[i].empty()) throw ConfigError("--override: empty path segment in '" + key + "'");
    Json& child = (*node)[parts[i]];
    if (child.is_null()) child = Json::object();
    if (!child.is_object()) throw ConfigError(key + ": parent is not an object");
    node = &child;
  }
  (*node)[parts.back()] = std::move(value);
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config: cannot open '" + path + "'");
  Json doc = Json::parse(in, nullptr, false, true);
  if (doc.is_discarded()) throw ConfigError("--config: '" + path + "' is not valid JSON");
  if (!doc.is_object()) throw ConfigError("--config: top level must be an object");
  return doc;
}

ExperimentConfig resolve_config(const Json& user) {
  if (!user.is_object()) throw ConfigError("config: top level must be an object");
  ModelKind model = ModelKind::IXY;
  if (user.contains("model")) {
    if (!user["model"].is_string()) bad("model", "must be a string");
    try {
      model = parse_model_kind(user["model"].get<std::string>());
    } catch (const ParameterError& e) {
      bad("model", e.what());
    }
  }
  Json doc = default_config(model);
  check_keys(user, doc, "");
  // h1 may also be a list of quench targets.
  Json patch = user;
  std::vector<double> h1_list;
  if (patch.contains("h1") && patch["h1"].is_array()) {
    for (std::size_t i = 0; i < patch["h1"].size(); ++i) {
      const Json& v = patch["h1"][i];
      if (!v.is_number()) bad("h1[" + std::to_string(i) + "]", "must be a number");
      h1_list.push_back(v.get<double>());
    }
    if (h1_list.empty()) bad("h1", "list must not be empty");
  }
  doc.merge_patch(patch);

  ExperimentConfig cfg;
  cfg.params.model = model;
  cfg.params.gamma = number(doc, "params.gamma");
  cfg.params.delta = number(doc, "params.delta");
  cfg.params.h_a = number(doc, "params.h_a");
  cfg.params.alpha = number(doc, "params.alpha");
  cfg.params.n_sites = integer(doc, "params.n_sites", 2);
  cfg.h0 = number(doc, "h0");
  cfg.params.h = cfg.h0;
  cfg.h_spectrum = number(doc, "h");
  if (h1_list.empty()) h1_list.push_back(number(doc, "h1"));
  cfg.h1 = h1_list;
  try {
    cfg.params.validate();
  } catch (const ParameterError& e) {
    bad("params", e.what());
  }

  cfg.sweep = {number(doc, "sweep.start"), number(doc, "sweep.stop"),
               positive(doc, "sweep.step")};
  if (cfg.sweep.stop < cfg.sweep.start) bad("sweep", "stop < start gives an empty grid");
  cfg.time = {number(doc, "time.t_max"), positive(doc, "time.dt")};
  try {
    cfg.time.validate();
  } catch (const ParameterError& e) {
    bad("time", e.what());
  }
  cfg.window = {positive(doc, "window.tau0"), positive(doc, "window.tau1"),
                positive(doc, "window.tau")};
  try {
    cfg.window.validate();
  } catch (const ParameterError& e) {
    bad("window", e.what());
  }

  cfg.solver = choice<SweepSolver>(doc, "solver",
                                   {{"auto", SweepSolver::Auto},
                                    {"momentum", SweepSolver::Momentum},
                                    {"exact_diag", SweepSolver::ExactDiag}});
  try {
    resolve_solver(model, cfg.solver);
  } catch (const ParameterError& e) {
    bad("solver", e.what());
  }
  cfg.signal = choice<EtaSignal>(doc, "detect.signal",
                                 {{"transient", EtaSignal::Transient},
                                  {"steady", EtaSignal::Steady}});
  cfg.method = choice<DetectMethod>(doc, "detect.method",
                                    {{"kink", DetectMethod::Kink},
                                     {"curvature_flip", DetectMethod::CurvatureFlip}});
  if (!at_path(doc, "detect.median_filter").is_boolean()) {
    bad("detect.median_filter", "must be true or false");
  }
  cfg.median_filter = doc["detect"]["median_filter"].get<bool>();

  cfg.ed.basis = choice<EdBasis>(doc, "ed.basis",
                                 {{"sector", EdBasis::Sector}, {"full", EdBasis::Full}});
  cfg.ed.max_sites = integer(doc, "ed.max_sites", 2);
  if (cfg.ed.max_sites > kMaxDenseSites) {
    bad("ed.max_sites", "must be <= " + std::to_string(kMaxDenseSites));
  }
  cfg.eig.residual_threshold = positive(doc, "tolerances.eig_residual");
  cfg.eig.condition_threshold = positive(doc, "tolerances.condition");
  cfg.reality_tol = positive(doc, "tolerances.reality");
  cfg.ed.eig = cfg.eig;
  cfg.ed.reality_tol = cfg.reality_tol;

  cfg.out_dir = text(doc, "output.directory");
  cfg.format = choice<std::string>(doc, "output.format", {{"csv", "csv"}, {"json", "json"}});
  cfg.threads = integer(doc, "threads", 1);
  cfg.resolved = doc;
  if (h1_list.size() > 1) cfg.resolved["h1"] = h1_list;
  return cfg;
}

}  // namespace rtq::cli
