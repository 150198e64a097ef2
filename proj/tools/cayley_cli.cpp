// Command-line front end: validate / coefficients / green / evolve /
// simulate / oracle / asymptotics / compare. File formats are documented in
// FORMATS.md; every file output gets a .manifest.json sidecar recording the
// resolved inputs so a run can be reproduced exactly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cayley/dynamics.hpp"
#include "cayley/gillespie.hpp"
#include "cayley/io.hpp"
#include "cayley/master.hpp"
#include "cayley/rates.hpp"
#include "cayley/spectral.hpp"
#include "cayley/tree.hpp"
#include "cayley/version.hpp"

using json = nlohmann::json;
using namespace cayley;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buffer;
}

// Sidecar manifest next to an output file.
void write_manifest(const std::string& output_path, const std::string& command,
                    const json& inputs, std::optional<std::uint64_t> seed = std::nullopt) {
  json manifest{{"schema_version", kSchemaVersion},
                {"tool_version", kVersion},
                {"command", command},
                {"inputs", inputs},
                {"timestamp", iso_timestamp()}};
  if (seed) manifest["seed"] = *seed;
  std::ofstream out(output_path + ".manifest.json");
  out << manifest.dump(2) << '\n';
}

json base_inputs(const std::string& rates_path) {
  return json{{"rates_file", std::filesystem::absolute(rates_path).string()}};
}

// Sink that is either a file (with manifest) or stdout.
struct Output {
  std::ofstream file;
  bool to_file = false;
  std::ostream& stream() { return to_file ? static_cast<std::ostream&>(file) : std::cout; }

  static Output open(const std::string& path, const std::string& command, const json& inputs,
                     std::optional<std::uint64_t> seed = std::nullopt) {
    Output out;
    if (!path.empty() && path != "-") {
      out.file.open(path);
      if (!out.file) throw std::runtime_error("cannot write " + path);
      out.to_file = true;
      write_manifest(path, command, inputs, seed);
    }
    return out;
  }
};

struct LoadedModel {
  RateModel model;
  Coefficients coeffs;
};

// Load + symmetry/nonnegativity + autonomy gate shared by the physics
// commands. Throws invalid_argument (usage) for unreadable files; returns
// nullopt after printing the violation (domain failure) otherwise.
std::optional<LoadedModel> load_checked(const std::string& path, double tol) {
  const RateModel model = load_rate_model(path);
  const SymmetryReport symmetry = validate_symmetry(model);
  if (!symmetry.ok()) {
    for (const auto& p : symmetry.problems) std::cerr << "rates: " << p << '\n';
    return std::nullopt;
  }
  const AutonomyCheck autonomy = check_autonomy(model);
  if (!autonomy.ok(tol)) {
    std::cerr << "rates: not autonomous, residual " << format_double(autonomy.residual)
              << " (tolerance " << format_double(tol) << ")\n";
    return std::nullopt;
  }
  return LoadedModel{model, derive_coefficients(model)};
}

void require_ascending_times(const std::vector<double>& times) {
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (times[k] > times[k + 1]) {
      throw std::invalid_argument("--times must be ascending");
    }
  }
  if (!times.empty() && times.front() < 0.0) {
    throw std::invalid_argument("--times must be >= 0");
  }
}

InitSpec parse_init_string(const std::string& text, const TruncatedTree& tree) {
  if (text == "empty") return InitSpec::empty();
  if (text == "full") return InitSpec::full(tree);
  if (text.rfind("bernoulli:", 0) == 0) {
    const double p = std::stod(text.substr(10));
    return InitSpec::bernoulli(p);
  }
  if (text.rfind("bitmask:", 0) == 0) {
    return InitSpec::bitmask(std::stoull(text.substr(8), nullptr, 16));
  }
  throw std::invalid_argument("bad --init \"" + text +
                              "\"; expected empty|full|bernoulli:p|bitmask:HEX");
}

std::string time_tag(double t) {
  std::string tag = format_double(t);
  for (char& c : tag) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return tag;
}

// ---------------------------------------------------------------- validate

struct ValidateOpts {
  std::string rates_path;
  double tol = 0.0;
};

int cmd_validate(const ValidateOpts& opt) {
  const RateModel model = load_rate_model(opt.rates_path);
  const SymmetryReport symmetry = validate_symmetry(model);
  bool negatives = false, asymmetric = false;
  for (const auto& p : symmetry.problems) {
    (p.find("negative") != std::string::npos ? negatives : asymmetric) = true;
  }
  std::cout << "nonnegativity: " << (negatives ? "violated" : "ok") << '\n';
  std::cout << "symmetry: " << (asymmetric ? "violated" : "ok") << '\n';
  for (const auto& p : symmetry.problems) std::cout << "  " << p << '\n';

  const AutonomyCheck autonomy = check_autonomy(model);
  std::cout << "autonomy residual: " << format_double(autonomy.residual) << " -> "
            << (autonomy.ok(opt.tol) ? "ok" : "violated") << '\n';

  return symmetry.ok() && autonomy.ok(opt.tol) ? kExitOk : kExitDomain;
}

// ------------------------------------------------------------ coefficients

struct CoefficientsOpts {
  std::string rates_path;
  double tol = 0.0;
};

int cmd_coefficients(const CoefficientsOpts& opt) {
  const auto loaded = load_checked(opt.rates_path, opt.tol);
  if (!loaded) return kExitDomain;
  const Coefficients& c = loaded->coeffs;

  json out{{"schema_version", kSchemaVersion}, {"alpha", c.alpha}, {"beta", c.beta},
           {"gamma", c.gamma},                 {"eta", c.eta},     {"xi", c.xi}};
  json warnings = json::array();
  if (c.conserved()) {
    out["stationary"] = "conserved";
  } else {
    out["stationary"] = *c.stationary;
    if (*c.stationary < 0.0 || *c.stationary > 1.0) {
      warnings.push_back("stationary density outside [0, 1]; check the input rates");
    }
  }
  out["warnings"] = warnings;
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------- green

struct GreenOpts {
  std::string rates_path;
  int a_max = 10;
  int b_max = 10;
  std::vector<double> times;
  std::string limit = "none";
  std::string format = "csv";
  std::string out_prefix;
  bool log_space = false;
  std::string check;
  double rel_tol = 1e-10;
  std::size_t nodes = 64;
  double tol = 0.0;
};

int cmd_green(const GreenOpts& opt) {
  require_ascending_times(opt.times);
  const auto loaded = load_checked(opt.rates_path, opt.tol);
  if (!loaded) return kExitDomain;
  const SpectralParams params = SpectralParams::from(loaded->coeffs);
  if (opt.limit == "chain" && params.xi != 2) {
    std::cerr << "--limit chain requires xi == 2 (the file has xi = " << params.xi << ")\n";
    return kExitDomain;
  }
  const GreenEvaluator eval(params, opt.nodes, opt.rel_tol);

  const auto entry = [&](int a, int b, double t) -> GreenResult {
    if (opt.limit == "chain") return green_chain(params.beta, params.gamma, a, b, t);
    if (opt.limit == "large-time") return green_large_time(params, a, b, t);
    if (opt.limit == "large-xi") return green_large_xi(params, a, b, t);
    return eval.green(a, b, t);
  };

  json inputs = base_inputs(opt.rates_path);
  inputs["a_max"] = opt.a_max;
  inputs["b_max"] = opt.b_max;
  inputs["times"] = opt.times;
  inputs["limit"] = opt.limit;
  inputs["log_space"] = opt.log_space;
  inputs["rel_tol"] = opt.rel_tol;

  if (opt.format == "json") {
    json records = json::array();
    for (double t : opt.times) {
      for (int a = 0; a <= opt.a_max; ++a) {
        for (int b = 0; b <= opt.b_max; ++b) {
          const GreenResult g = entry(a, b, t);
          records.push_back(json{{"a", a},
                                 {"b", b},
                                 {"t", t},
                                 {"value", g.value()},
                                 {"log_prefactor", g.log_prefactor},
                                 {"amplitude", g.amplitude}});
        }
      }
    }
    const std::string path = opt.out_prefix.empty() ? "" : opt.out_prefix + ".json";
    Output out = Output::open(path, "green", inputs);
    out.stream() << json{{"schema_version", kSchemaVersion}, {"records", records}}.dump(2)
                 << '\n';
  } else {
    for (double t : opt.times) {
      const std::string path =
          opt.out_prefix.empty() ? "" : opt.out_prefix + "_t" + time_tag(t) + ".csv";
      Output out = Output::open(path, "green", inputs);
      auto& os = out.stream();
      if (!out.to_file) os << "# t = " << format_double(t) << '\n';
      os << "a\\b";
      for (int b = 0; b <= opt.b_max; ++b) os << ',' << b;
      os << '\n';
      for (int a = 0; a <= opt.a_max; ++a) {
        os << a;
        for (int b = 0; b <= opt.b_max; ++b) {
          const GreenResult g = entry(a, b, t);
          os << ',' << format_double(opt.log_space ? g.log_value() : g.value());
        }
        os << '\n';
      }
    }
  }

  if (opt.check == "conservation") {
    if (opt.limit != "none") {
      std::cerr << "conservation check uses the quadrature values, not --limit\n";
    }
    for (double t : opt.times) {
      std::cout << "conservation t=" << format_double(t) << ": |sum - 1| = "
                << format_double(std::fabs(conservation_sum(eval, t) - 1.0)) << '\n';
    }
  }
  return kExitOk;
}

// ----------------------------------------------------------------- evolve

struct EvolveOpts {
  std::string rates_path;
  std::string profile_path;
  std::vector<double> times;
  std::string solver = "shell";
  int a_max = -1;
  int report_a_max = -1;
  bool dynamic = false;
  std::string out_path;
  double tol = 0.0;
};

int cmd_evolve(const EvolveOpts& opt) {
  require_ascending_times(opt.times);
  const auto loaded = load_checked(opt.rates_path, opt.tol);
  if (!loaded) return kExitDomain;
  const Coefficients& c = loaded->coeffs;
  const InitialProfile profile = load_initial_profile(opt.profile_path);
  const double rho_st = c.stationary_or(0.0);

  double t_max = 0.0;
  for (double t : opt.times) t_max = std::max(t_max, t);
  const int support = profile.step ? profile.step->radius
                                   : static_cast<int>(profile.field->values.size()) - 1;
  int report = opt.report_a_max;
  if (report < 0) {
    report = support +
             static_cast<int>(std::ceil(2.0 * std::exp(c.eta) * std::fabs(c.beta) * t_max)) +
             5;
  }

  json inputs = base_inputs(opt.rates_path);
  inputs["profile"] = std::filesystem::absolute(opt.profile_path).string();
  inputs["times"] = opt.times;
  inputs["solver"] = opt.solver;
  inputs["dynamic"] = opt.dynamic;
  Output out = Output::open(opt.out_path, "evolve", inputs);
  auto& os = out.stream();
  os << "t,a,rho\n";

  const GreenEvaluator eval(SpectralParams::from(c));
  for (double t : opt.times) {
    std::vector<double> values(static_cast<std::size_t>(report) + 1);
    if (opt.solver == "green") {
      for (int a = 0; a <= report; ++a) {
        values[a] = profile.step
                        ? step_profile_solution(eval, c, *profile.step, a, t) + rho_st
                        : solve_green(eval, c, *profile.field, a, t);
      }
    } else {
      const DensityField init = profile.step
                                    ? step_initial(*profile.step, c, std::max(report, support))
                                    : *profile.field;
      const int a_max = opt.a_max > 0
                            ? opt.a_max
                            : std::max(ballistic_a_max(SpectralParams::from(c), t, support),
                                       report);
      const DensityField evolved = evolve_shell_ode(c, init, t, a_max);
      for (int a = 0; a <= report; ++a) values[a] = evolved.values[a];
    }
    for (int a = 0; a <= report; ++a) {
      os << format_double(t) << ',' << a << ','
         << format_double(opt.dynamic ? values[a] - rho_st : values[a]) << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string rates_path;
  int xi = 0;  // 0: from the rates file
  int depth = 2;
  std::string init = "empty";
  std::size_t runs = 1000;
  std::uint64_t seed = 0;
  std::vector<double> times;
  unsigned threads = 0;
  std::string out_path;
  std::string summary_path;
};

int cmd_simulate(const SimulateOpts& opt) {
  require_ascending_times(opt.times);
  RateModel model = load_rate_model(opt.rates_path);
  if (opt.xi > 0) model.xi = opt.xi;
  const SymmetryReport symmetry = validate_symmetry(model);
  if (!symmetry.ok()) {
    for (const auto& p : symmetry.problems) std::cerr << "rates: " << p << '\n';
    return kExitDomain;
  }
  const TruncatedTree tree = build_tree(model.xi, opt.depth);
  const InitSpec init = parse_init_string(opt.init, tree);

  EnsembleConfig config;
  config.runs = opt.runs;
  config.master_seed = opt.seed;
  config.t_samples = opt.times;
  config.threads = opt.threads;
  const EnsembleResult result = ensemble_mean(model, tree, config, init);

  json inputs = base_inputs(opt.rates_path);
  inputs["xi"] = model.xi;
  inputs["depth"] = opt.depth;
  inputs["init"] = opt.init;
  inputs["runs"] = opt.runs;
  inputs["times"] = opt.times;
  inputs["threads"] = opt.threads;
  Output out = Output::open(opt.out_path, "simulate", inputs, opt.seed);
  auto& os = out.stream();
  os << "t,site,shell,mean,stderr\n";
  for (std::size_t k = 0; k < result.t_samples.size(); ++k) {
    for (int i = 0; i < tree.sites(); ++i) {
      os << format_double(result.t_samples[k]) << ',' << i << ',' << tree.shell_of[i] << ','
         << format_double(result.mean(k, i)) << ',' << format_double(result.std_error(k, i))
         << '\n';
    }
  }

  const json summary{{"schema_version", kSchemaVersion},
                     {"command", "simulate"},
                     {"runs", result.runs},
                     {"master_seed", opt.seed},
                     {"total_events", result.total_events},
                     {"elapsed_seconds", result.elapsed_seconds},
                     {"events_per_second", result.events_per_second()}};
  if (!opt.summary_path.empty()) {
    std::ofstream summary_file(opt.summary_path);
    summary_file << summary.dump(2) << '\n';
    write_manifest(opt.summary_path, "simulate", inputs, opt.seed);
  } else {
    std::cerr << summary.dump(2) << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------------ oracle

struct OracleOpts {
  std::string rates_path;
  int xi = 0;
  int depth = 2;
  std::string init = "empty";
  std::vector<double> times;
  bool witness = false;
  std::string out_path;
};

int cmd_oracle(const OracleOpts& opt) {
  require_ascending_times(opt.times);
  RateModel model = load_rate_model(opt.rates_path);
  if (opt.xi > 0) model.xi = opt.xi;
  const SymmetryReport symmetry = validate_symmetry(model);
  if (!symmetry.ok()) {
    for (const auto& p : symmetry.problems) std::cerr << "rates: " << p << '\n';
    return kExitDomain;
  }
  const TruncatedTree tree = build_tree(model.xi, opt.depth);
  const MasterSystem sys = make_master_system(model, tree);

  const InitSpec init = parse_init_string(opt.init, tree);
  std::vector<double> dist;
  if (init.kind == InitSpec::Kind::bitmask) {
    dist = point_mass(sys, init.bits);
  } else {
    dist = product_bernoulli(sys, init.shell_p);
  }

  json inputs = base_inputs(opt.rates_path);
  inputs["xi"] = model.xi;
  inputs["depth"] = opt.depth;
  inputs["init"] = opt.init;
  inputs["times"] = opt.times;
  Output out = Output::open(opt.out_path, "oracle", inputs);
  auto& os = out.stream();
  os << "t,site,shell,mean\n";
  double t_now = 0.0;
  for (double t : opt.times) {
    MasterResult step = master_evolve(sys, std::move(dist), t - t_now);
    dist = std::move(step.distribution);
    t_now = t;
    for (int i = 0; i < tree.sites(); ++i) {
      os << format_double(t) << ',' << i << ',' << tree.shell_of[i] << ','
         << format_double(step.mean[i]) << '\n';
    }
  }

  if (opt.witness) {
    const WitnessReport report = autonomy_witness(model, tree, opt.times);
    const json w{{"schema_version", kSchemaVersion},
                 {"max_gap", report.max_gap},
                 {"per_time_gap", report.per_time_gap},
                 {"times", opt.times}};
    std::cout << w.dump(2) << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------- asymptotics

struct AsymptoticsOpts {
  std::string rates_path;
  int a = 0;
  int b = 0;
  std::vector<double> times;
  std::string out_path;
  double tol = 0.0;
};

int cmd_asymptotics(const AsymptoticsOpts& opt) {
  require_ascending_times(opt.times);
  const auto loaded = load_checked(opt.rates_path, opt.tol);
  if (!loaded) return kExitDomain;
  const SpectralParams params = SpectralParams::from(loaded->coeffs);
  const GreenEvaluator eval(params);

  json inputs = base_inputs(opt.rates_path);
  inputs["a"] = opt.a;
  inputs["b"] = opt.b;
  inputs["times"] = opt.times;
  Output out = Output::open(opt.out_path, "asymptotics", inputs);
  auto& os = out.stream();

  try {
    std::cout << "crossover time t_c = " << format_double(crossover_time(params)) << '\n';
  } catch (const std::domain_error& e) {
    std::cout << "crossover time: " << e.what() << '\n';
  }

  os << "t,log_green,log_large_time,log_large_xi\n";
  for (double t : opt.times) {
    os << format_double(t) << ',';
    os << format_double(eval.green(opt.a, opt.b, t).log_value()) << ',';
    try {
      os << format_double(green_large_time(params, opt.a, opt.b, t).log_value());
    } catch (const std::domain_error&) {
      os << "nan";
    }
    os << ',' << format_double(green_large_xi(params, opt.a, opt.b, t).log_value()) << '\n';
  }
  return kExitOk;
}

// ----------------------------------------------------------------- compare

struct CompareOpts {
  std::string rates_path;
  std::string scenario_path;
  double tol = 0.0;
};

struct Scenario {
  std::vector<std::string> solvers;
  InitialProfile init;
  std::vector<double> times;
  int depth = 12;
  int report_a_max = 8;
  std::size_t runs = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  double deterministic_tol = 1e-6;
  double ensemble_sigmas = 3.0;
};

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario parse error: ") + e.what());
  }
  Scenario s;
  for (const auto& name : j.value("solvers", json::array())) {
    const std::string solver = name.get<std::string>();
    if (solver != "green" && solver != "shell" && solver != "site" && solver != "ensemble") {
      throw std::invalid_argument("unknown solver \"" + solver + "\" in scenario");
    }
    s.solvers.push_back(solver);
  }
  if (j.contains("init")) s.init = parse_initial_profile(j["init"].dump());
  for (const auto& t : j.value("times", json::array())) s.times.push_back(t.get<double>());
  s.depth = j.value("depth", s.depth);
  s.report_a_max = j.value("report_a_max", s.report_a_max);
  s.runs = j.value("runs", s.runs);
  s.seed = j.value("seed", s.seed);
  s.threads = j.value("threads", s.threads);
  if (j.contains("tolerances")) {
    s.deterministic_tol = j["tolerances"].value("deterministic", s.deterministic_tol);
    s.ensemble_sigmas = j["tolerances"].value("ensemble_sigmas", s.ensemble_sigmas);
  }
  return s;
}

int cmd_compare(const CompareOpts& opt) {
  const auto loaded = load_checked(opt.rates_path, opt.tol);
  if (!loaded) return kExitDomain;
  const Coefficients& c = loaded->coeffs;
  const Scenario scenario = parse_scenario(opt.scenario_path);
  if (scenario.solvers.empty() || scenario.times.empty()) {
    std::cout << "empty scenario, nothing to compare\n";
    return kExitOk;
  }
  require_ascending_times(scenario.times);
  if (!scenario.init.step && !scenario.init.field) {
    throw std::invalid_argument("scenario needs an \"init\" profile");
  }

  const double rho_st = c.stationary_or(0.0);
  const int report = scenario.report_a_max;
  const int support = scenario.init.step
                          ? scenario.init.step->radius
                          : static_cast<int>(scenario.init.field->values.size()) - 1;
  double t_max = 0.0;
  for (double t : scenario.times) t_max = std::max(t_max, t);

  // Full initial shell profile.
  std::vector<double> init_shell(static_cast<std::size_t>(std::max(report, support)) + 1,
                                 rho_st);
  if (scenario.init.step) {
    for (int a = 0; a <= scenario.init.step->radius; ++a) {
      init_shell[a] += scenario.init.step->height;
    }
  } else {
    for (std::size_t a = 0; a < scenario.init.field->values.size(); ++a) {
      init_shell[a] = scenario.init.field->values[a];
    }
  }

  // Boundary-reachability gate for comparisons that mix the infinite-tree
  // solvers with the finite tree (ODE or ensemble). Calibrated so the
  // boundary effect on reported shells stays well below 1e-6.
  const int horizon_margin =
      static_cast<int>(std::ceil(std::exp(c.eta) * std::fabs(c.beta) * t_max)) + 2;
  const bool horizon_ok = scenario.depth >= std::max(report, support) + horizon_margin;

  const auto wants = [&](const char* name) {
    return std::count(scenario.solvers.begin(), scenario.solvers.end(), name) > 0;
  };

  // values[solver][time][shell]
  std::map<std::string, std::vector<std::vector<double>>> shells;
  const GreenEvaluator eval(SpectralParams::from(c));

  if (wants("green")) {
    auto& v = shells["green"];
    for (double t : scenario.times) {
      std::vector<double> row(static_cast<std::size_t>(report) + 1);
      for (int a = 0; a <= report; ++a) {
        row[a] = scenario.init.step
                     ? step_profile_solution(eval, c, *scenario.init.step, a, t) + rho_st
                     : solve_green(eval, c, DensityField::per_shell(init_shell), a, t);
      }
      v.push_back(std::move(row));
    }
  }
  if (wants("shell")) {
    auto& v = shells["shell"];
    for (double t : scenario.times) {
      const DensityField evolved =
          evolve_shell_ode(c, DensityField::per_shell(init_shell), t,
                           std::max(ballistic_a_max(SpectralParams::from(c), t, support),
                                    report));
      v.push_back(std::vector<double>(evolved.values.begin(),
                                      evolved.values.begin() + report + 1));
    }
  }

  TruncatedTree tree;
  std::vector<double> site_init;
  if (wants("site") || wants("ensemble")) {
    tree = build_tree(c.xi, scenario.depth);
    site_init.resize(tree.sites());
    for (int i = 0; i < tree.sites(); ++i) {
      const int shell = tree.shell_of[i];
      const double v = shell < static_cast<int>(init_shell.size()) ? init_shell[shell] : rho_st;
      if (v < 0.0 || v > 1.0) {
        throw std::invalid_argument(
            "initial profile leaves [0,1]; finite-tree solvers need densities");
      }
      site_init[i] = v;
    }
  }
  if (wants("site")) {
    auto& v = shells["site"];
    for (double t : scenario.times) {
      const DensityField evolved =
          evolve_site_ode(loaded->model, tree, DensityField::per_site(site_init), t, 1e-10);
      std::vector<double> row(static_cast<std::size_t>(report) + 1, 0.0);
      std::vector<int> counts(static_cast<std::size_t>(report) + 1, 0);
      for (int i = 0; i < tree.sites(); ++i) {
        const int shell = tree.shell_of[i];
        if (shell <= report) {
          row[shell] += evolved.values[i];
          ++counts[shell];
        }
      }
      for (int a = 0; a <= report; ++a) row[a] /= counts[a];
      v.push_back(std::move(row));
    }
  }

  std::optional<EnsembleResult> ensemble;
  if (wants("ensemble")) {
    std::vector<double> shell_p(init_shell.begin(), init_shell.end());
    shell_p.resize(static_cast<std::size_t>(scenario.depth) + 1, rho_st);
    EnsembleConfig config;
    config.runs = scenario.runs;
    config.master_seed = scenario.seed;
    config.t_samples = scenario.times;
    config.threads = scenario.threads;
    ensemble = ensemble_mean(loaded->model, tree, config,
                             InitSpec::bernoulli_per_shell(std::move(shell_p)));
  }

  // Pairwise report.
  int domain_failures = 0;
  std::cout << "pair                          max_deviation            tolerance   verdict\n";
  const auto deterministic_pair = [&](const std::string& x, const std::string& y) {
    const bool finite = x == "site" || y == "site";
    const bool infinite = x == "green" || x == "shell" || y == "green" || y == "shell";
    if (finite && infinite && !horizon_ok) {
      std::printf("%-28s  %-23s  %-10s  SKIPPED (boundary reachable: depth %d < %d)\n",
                  (x + " vs " + y).c_str(), "-", "-", scenario.depth,
                  std::max(report, support) + horizon_margin);
      return;
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < scenario.times.size(); ++k) {
      for (int a = 0; a <= report; ++a) {
        worst = std::max(worst, std::fabs(shells[x][k][a] - shells[y][k][a]));
      }
    }
    const bool pass = worst <= scenario.deterministic_tol;
    if (!pass) ++domain_failures;
    std::printf("%-28s  %-23s  %-10s  %s\n", (x + " vs " + y).c_str(),
                format_double(worst).c_str(), format_double(scenario.deterministic_tol).c_str(),
                pass ? "PASS" : "FAIL");
  };

  std::vector<std::string> deterministic;
  for (const char* name : {"green", "shell", "site"}) {
    if (shells.count(name)) deterministic.push_back(name);
  }
  for (std::size_t i = 0; i < deterministic.size(); ++i) {
    for (std::size_t j = i + 1; j < deterministic.size(); ++j) {
      deterministic_pair(deterministic[i], deterministic[j]);
    }
  }

  if (ensemble) {
    for (const auto& name : deterministic) {
      const bool infinite = name == "green" || name == "shell";
      if (infinite && !horizon_ok) {
        std::printf("%-28s  %-23s  %-10s  SKIPPED (boundary reachable)\n",
                    ("ensemble vs " + name).c_str(), "-", "-");
        continue;
      }
      double worst_sigma = 0.0;
      for (std::size_t k = 0; k < scenario.times.size(); ++k) {
        for (int i = 0; i < tree.sites(); ++i) {
          const int shell = tree.shell_of[i];
          if (shell > report) continue;
          const double se = ensemble->std_error(k, i);
          const double dev = std::fabs(ensemble->mean(k, i) - shells[name][k][shell]);
          worst_sigma = std::max(worst_sigma, se > 0.0 ? dev / se : (dev > 0.0 ? 1e30 : 0.0));
        }
      }
      const bool pass = worst_sigma <= scenario.ensemble_sigmas;
      if (!pass) ++domain_failures;
      std::printf("%-28s  %-23s  %-10s  %s\n", ("ensemble vs " + name).c_str(),
                  (format_double(worst_sigma) + " se").c_str(),
                  (format_double(scenario.ensemble_sigmas) + " se").c_str(),
                  pass ? "PASS" : "FAIL");
    }
  }
  return domain_failures == 0 ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "single-species autonomous reaction-diffusion models on Cayley trees\n"
      "(file formats: see FORMATS.md)"};
  app.set_version_flag("--version", kVersion);
  // Flags beat config-file values, which beat built-in defaults.
  app.set_config("--config", "", "read option defaults from an INI/TOML file");
  app.require_subcommand(1);
  std::function<int()> run;

  auto add_times = [](CLI::App* cmd, std::vector<double>& times) {
    cmd->add_option("--times", times, "comma-separated ascending sample times")
        ->required()
        ->delimiter(',');
  };

  {
    auto opt = std::make_shared<ValidateOpts>();
    CLI::App* cmd = app.add_subcommand(
        "validate", "check symmetry, nonnegativity and the closure criterion");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("--tol", opt->tol, "tolerance on the closure residual (default exact)");
    cmd->callback([opt, &run] { run = [opt] { return cmd_validate(*opt); }; });
  }
  {
    auto opt = std::make_shared<CoefficientsOpts>();
    CLI::App* cmd =
        app.add_subcommand("coefficients", "derive (alpha, beta, gamma, eta, stationary)");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("--tol", opt->tol, "tolerance on the closure residual");
    cmd->callback([opt, &run] { run = [opt] { return cmd_coefficients(*opt); }; });
  }
  {
    auto opt = std::make_shared<GreenOpts>();
    CLI::App* cmd = app.add_subcommand("green", "shell propagator matrices G_a^b(t)");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("--a-max", opt->a_max, "largest row shell (default 10)");
    cmd->add_option("--b-max", opt->b_max, "largest column shell (default 10)");
    add_times(cmd, opt->times);
    cmd->add_option("--limit", opt->limit, "closed form instead of quadrature")
        ->check(CLI::IsMember({"none", "chain", "large-time", "large-xi"}));
    cmd->add_option("--format", opt->format, "csv (default) or json records")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", opt->out_prefix, "output prefix (default stdout)");
    cmd->add_flag("--log-space", opt->log_space, "emit log-values in CSV cells");
    cmd->add_option("--check", opt->check, "extra check to run (conservation)")
        ->check(CLI::IsMember({"conservation"}));
    cmd->add_option("--rel-tol", opt->rel_tol, "quadrature tolerance (default 1e-10)");
    cmd->add_option("--nodes", opt->nodes, "initial quadrature nodes (default 64)");
    cmd->add_option("--tol", opt->tol, "tolerance on the closure residual");
    cmd->callback([opt, &run] { run = [opt] { return cmd_green(*opt); }; });
  }
  {
    auto opt = std::make_shared<EvolveOpts>();
    CLI::App* cmd = app.add_subcommand("evolve", "deterministic shell density evolution");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("--profile", opt->profile_path, "initial profile (JSON)")->required();
    add_times(cmd, opt->times);
    cmd->add_option("--solver", opt->solver, "shell (ODE, default) or green (spectral)")
        ->check(CLI::IsMember({"shell", "green"}));
    cmd->add_option("--a-max", opt->a_max, "truncation shell for the ODE");
    cmd->add_option("--report-a-max", opt->report_a_max, "largest shell in the output");
    cmd->add_flag("--dynamic", opt->dynamic, "emit the dynamic part (stationary removed)");
    cmd->add_option("--out", opt->out_path, "output CSV (default stdout)");
    cmd->add_option("--tol", opt->tol, "tolerance on the closure residual");
    cmd->callback([opt, &run] { run = [opt] { return cmd_evolve(*opt); }; });
  }
  {
    auto opt = std::make_shared<SimulateOpts>();
    CLI::App* cmd = app.add_subcommand("simulate", "Gillespie ensemble on a finite tree");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("--xi", opt->xi, "coordination number (default: from the rate file)");
    cmd->add_option("--depth", opt->depth, "tree depth (default 2)");
    cmd->add_option("--init", opt->init, "empty|full|bernoulli:p|bitmask:HEX");
    cmd->add_option("--runs", opt->runs, "independent runs (default 1000)");
    cmd->add_option("--seed", opt->seed, "master seed (default 0)");
    add_times(cmd, opt->times);
    cmd->add_option("--threads", opt->threads, "worker threads (default: hardware)");
    cmd->add_option("--out", opt->out_path, "output CSV (default stdout)");
    cmd->add_option("--summary", opt->summary_path, "summary JSON path (default stderr)");
    cmd->callback([opt, &run] { run = [opt] { return cmd_simulate(*opt); }; });
  }
  {
    auto opt = std::make_shared<OracleOpts>();
    CLI::App* cmd =
        app.add_subcommand("oracle", "exact master-equation means on a small tree");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("--xi", opt->xi, "coordination number (default: from the rate file)");
    cmd->add_option("--depth", opt->depth, "tree depth (default 2)");
    cmd->add_option("--init", opt->init, "empty|full|bernoulli:p|bitmask:HEX");
    add_times(cmd, opt->times);
    cmd->add_flag("--witness", opt->witness,
                  "also report the gap to the closed density ODE");
    cmd->add_option("--out", opt->out_path, "output CSV (default stdout)");
    cmd->callback([opt, &run] { run = [opt] { return cmd_oracle(*opt); }; });
  }
  {
    auto opt = std::make_shared<AsymptoticsOpts>();
    CLI::App* cmd =
        app.add_subcommand("asymptotics", "quadrature vs closed-form limits in log space");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("--a", opt->a, "row shell (default 0)");
    cmd->add_option("--b", opt->b, "column shell (default 0)");
    add_times(cmd, opt->times);
    cmd->add_option("--out", opt->out_path, "output CSV (default stdout)");
    cmd->add_option("--tol", opt->tol, "tolerance on the closure residual");
    cmd->callback([opt, &run] { run = [opt] { return cmd_asymptotics(*opt); }; });
  }
  {
    auto opt = std::make_shared<CompareOpts>();
    CLI::App* cmd = app.add_subcommand(
        "compare", "cross-check solvers against each other on a scenario");
    cmd->add_option("rates", opt->rates_path, "rate file (JSON)")->required();
    cmd->add_option("scenario", opt->scenario_path, "scenario file (JSON)")->required();
    cmd->add_option("--tol", opt->tol, "tolerance on the closure residual");
    cmd->callback([opt, &run] { run = [opt] { return cmd_compare(*opt); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    return run();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}
