#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "mfbm/errors.hpp"
#include "mfbm/estimator.hpp"
#include "mfbm/fredholm.hpp"
#include "mfbm/kernel.hpp"
#include "mfbm/specfun.hpp"

namespace mfbm::cli {

namespace {

using Json = nlohmann::ordered_json;

struct OptionSpec {
  const char* key;
  const char* help;
  const char* fallback;  // nullptr: no default
};

// Keys excluded from the provenance echo: they do not change the results.
bool is_plumbing(const std::string& key) {
  return key == "out" || key == "summary" || key == "threads" || key == "config" || key == "in";
}

const std::vector<OptionSpec>& common_options() {
  static const std::vector<OptionSpec> specs = {
      {"h1", "Hurst index H1, 1/2 <= H1 < H2", "0.6"},
      {"h2", "Hurst index H2 < 1", "0.8"},
      {"threads", "worker threads (0 = available parallelism)", "0"},
      {"out", "data output path ('-' = stdout)", "-"},
      {"summary", "JSON record path (default: stdout if --out is a file, else stderr)", nullptr},
  };
  return specs;
}

const std::vector<OptionSpec>& solver_options() {
  static const std::vector<OptionSpec> specs = {
      {"grading", "mesh grading exponent (0 = automatic)", "0"},
      {"cond_limit", "condition estimate that triggers a horizon perturbation", "1e10"},
      {"max_retries", "horizon perturbations before giving up", "3"},
  };
  return specs;
}

std::vector<OptionSpec> command_options(Command command) {
  std::vector<OptionSpec> specs = common_options();
  auto add = [&](std::initializer_list<OptionSpec> extra) {
    specs.insert(specs.end(), extra.begin(), extra.end());
  };
  auto add_solver = [&] {
    const auto& s = solver_options();
    specs.insert(specs.end(), s.begin(), s.end());
  };
  switch (command) {
    case Command::kKernelGrid:
      add({{"n", "grid intervals per axis", "64"}, {"t", "horizon T", "1"}});
      break;
    case Command::kSolve:
      add({{"t", "horizon T", "1"},
           {"n", "mesh cells", "256"},
           {"sigma1", "sigma1 > 0", "1"},
           {"sigma2", "sigma2 >= 0", "1"},
           {"residual", "compute the off-node residual (0/1)", "1"}});
      add_solver();
      break;
    case Command::kSimulate:
      add({{"theta", "drift theta", "1"},
           {"sigma1", "sigma1 > 0", "1"},
           {"sigma2", "sigma2 >= 0", "1"},
           {"t", "horizon T", "1"},
           {"n", "grid cells", "512"},
           {"seed", "master seed (required)", nullptr},
           {"replications", "number of paths", "1"},
           {"kind", "x (observed path) or y (transformed path)", "x"}});
      break;
    case Command::kIngest:
      add({{"in", "input path CSV (time, value)", nullptr}});
      break;
    case Command::kEstimate:
      add({{"in", "observed path CSV (time, value)", nullptr},
           {"sigma1", "sigma1 > 0", "1"},
           {"sigma2", "sigma2 >= 0", "1"},
           {"solver_n", "Fredholm mesh cells", "256"}});
      add_solver();
      break;
    case Command::kMonteCarlo:
      add({{"theta", "drift theta", "1"},
           {"sigma1", "sigma1 > 0", "1"},
           {"sigma2", "sigma2 >= 0", "1"},
           {"t", "horizon T", "10"},
           {"n", "grid cells", "512"},
           {"reps", "replications (>= 100)", "1000"},
           {"seed", "master seed (required)", nullptr},
           {"solver_n", "Fredholm mesh cells", "256"}});
      add_solver();
      break;
    case Command::kValidate:
      add({{"seed", "seed of the random test points", "2024"}});
      break;
  }
  return specs;
}

const std::vector<std::pair<const char*, Command>>& command_names() {
  static const std::vector<std::pair<const char*, Command>> names = {
      {"kernel-grid", Command::kKernelGrid}, {"solve", Command::kSolve},
      {"simulate", Command::kSimulate},      {"ingest", Command::kIngest},
      {"estimate", Command::kEstimate},      {"montecarlo", Command::kMonteCarlo},
      {"validate", Command::kValidate},
  };
  return names;
}

std::string normalize_key(std::string key) {
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  return key;
}

std::string flag_name(const std::string& key) {
  std::string flag = "--" + key;
  for (char& c : flag) {
    if (c == '_') c = '-';
  }
  return flag;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Destination for data and for the JSON record.
struct Sinks {
  std::ofstream data_file;
  std::ofstream summary_file;
  std::ostream* data = nullptr;
  std::ostream* summary = nullptr;

  Sinks(const RunConfig& config, std::ostream& out, std::ostream& err) {
    const std::string path = config.text("out");
    if (path == "-") {
      data = &out;
      summary = &err;
    } else {
      data_file.open(path);
      if (!data_file) throw DomainError("cannot open output file " + path);
      data = &data_file;
      summary = &out;
    }
    if (config.has("summary")) {
      summary_file.open(config.text("summary"));
      if (!summary_file) throw DomainError("cannot open summary file " + config.text("summary"));
      summary = &summary_file;
    }
  }
};

Json provenance_json(const RunConfig& config) {
  Json echo = Json::object();
  for (const auto& [k, v] : config.params) {
    if (!is_plumbing(k)) echo[k] = v;
  }
  return {{"artifact", "mfbm"}, {"version", kVersion}, {"command", to_string(config.command)},
          {"config", echo}};
}

HurstPair pair_of(const RunConfig& config) {
  return HurstPair::make(config.number("h1"), config.number("h2"));
}

double positive(const RunConfig& config, const std::string& key) {
  const double v = config.number(key);
  if (!(v > 0.0)) throw DomainError(key + " must be positive");
  return v;
}

SolverOptions solver_of(const RunConfig& config, const std::string& cells_key) {
  SolverOptions opts;
  opts.n = config.count(cells_key);
  opts.grading = config.number("grading");
  opts.cond_limit = positive(config, "cond_limit");
  opts.max_retries = static_cast<int>(config.count("max_retries"));
  opts.threads = static_cast<unsigned>(config.count("threads"));
  if (config.has("sigma1")) {
    const double s1 = positive(config, "sigma1");
    const double s2 = config.number("sigma2");
    if (s2 < 0.0) throw DomainError("sigma2 must be non-negative");
    opts.kernel_scale = (s2 / s1) * (s2 / s1);
  }
  return opts;
}

Json diagnostics_json(const SolverDiagnostics& d) {
  return {{"cond_estimate", d.cond_estimate}, {"residual_sup", d.residual_sup},
          {"lambda_probe", d.lambda_probe},   {"horizon_used", d.horizon_used},
          {"retries", d.retries}};
}

void emit(std::ostream& os, const Json& record) { os << record.dump() << '\n'; }

// ---------------------------------------------------------------- commands

int cmd_kernel_grid(const RunConfig& config, Sinks& sinks) {
  const MixedKernel kernel(pair_of(config));
  const std::size_t n = config.count("n");
  const double T = positive(config, "t");
  if (n < 1) throw DomainError("n must be at least 1");
  std::ostream& os = *sinks.data;
  os << config.provenance() << "\n" << "s,u,kappa0\n";
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = T * static_cast<double>(i) / static_cast<double>(n);
    for (std::size_t j = 0; j <= n; ++j) {
      const double u = T * static_cast<double>(j) / static_cast<double>(n);
      os << format_double(s) << ',' << format_double(u) << ',' << format_double(kernel.kappa0(s, u))
         << '\n';
    }
  }
  const auto& c = kernel.constants();
  Json rec = provenance_json(config);
  rec["c_diag"] = c.c_diag;
  rec["c_edge"] = c.c_edge;
  rec["points"] = (n + 1) * (n + 1);
  emit(*sinks.summary, rec);
  return 0;
}

int cmd_solve(const RunConfig& config, Sinks& sinks) {
  SolverOptions opts = solver_of(config, "n");
  opts.compute_residual = config.count("residual") != 0;
  const FredholmSolution sol = solve_hT(pair_of(config), positive(config, "t"), opts);
  std::ostream& os = *sinks.data;
  os << config.provenance() << "\n" << "u,h\n";
  for (std::size_t i = 0; i < sol.points.size(); ++i) {
    os << format_double(sol.points[i]) << ',' << format_double(sol.h_values[i]) << '\n';
  }
  const auto& c = sol.context->kernel.constants();
  const double j = weighted_integral(sol);
  Json rec = provenance_json(config);
  rec["horizon"] = sol.horizon();
  rec["points"] = sol.points.size();
  rec["kernel_scale"] = sol.kernel_scale;
  rec["weighted_integral"] = j;
  rec["qvar"] = c.gamma_h1 * c.gamma_h1 * j;
  rec["min_h"] = sol.min_h;
  rec["positive"] = sol.positive;
  rec["diagnostics"] = diagnostics_json({sol.cond_estimate, sol.residual_sup, sol.lambda_probe,
                                         sol.horizon(), sol.retries});
  emit(*sinks.summary, rec);
  return 0;
}

int cmd_simulate(const RunConfig& config, Sinks& sinks) {
  ModelParams model;
  model.theta = config.number("theta");
  model.sigma1 = positive(config, "sigma1");
  model.sigma2 = config.number("sigma2");
  if (model.sigma2 < 0.0) throw DomainError("sigma2 must be non-negative");
  model.hurst = pair_of(config);
  model.seed = config.seed();
  const std::string kind = config.text("kind");
  if (kind != "x" && kind != "y") throw DomainError("kind must be x or y");
  const std::size_t reps = config.count("replications");
  if (reps < 1) throw DomainError("replications must be at least 1");
  const std::size_t cells = config.count("n");
  if (cells < 1) throw DomainError("n must be at least 1");
  const auto grid = uniform_grid(positive(config, "t"), cells);

  std::ostream& os = *sinks.data;
  os << config.provenance() << "\n" << (reps > 1 ? "replication,time,value\n" : "time,value\n");
  for (std::size_t r = 0; r < reps; ++r) {
    SampledPath path = simulate_X(model, grid, r);
    if (kind == "y") {
      for (double& v : path.values) v /= model.sigma1;
      path = transform_Y(path, model.hurst);
    }
    for (std::size_t k = 0; k < path.times.size(); ++k) {
      if (reps > 1) os << r << ',';
      os << format_double(path.times[k]) << ',' << format_double(path.values[k]) << '\n';
    }
  }
  return 0;
}

SampledPath load_path(const RunConfig& config) {
  if (!config.has("in")) throw DomainError("--in is required");
  std::ifstream in(config.text("in"));
  if (!in) throw DomainError("cannot open input file " + config.text("in"));
  return read_path_csv(in);
}

int cmd_ingest(const RunConfig& config, Sinks& sinks) {
  const SampledPath path = load_path(config);
  write_path_csv(*sinks.data, path, config.provenance());
  Json rec = provenance_json(config);
  rec["points"] = path.times.size();
  rec["horizon"] = path.horizon();
  rec["step"] = path.times[1] - path.times[0];
  emit(*sinks.summary, rec);
  return 0;
}

Json estimate_json(const RunConfig& config, const EstimateResult& e) {
  Json rec = provenance_json(config);
  rec["theta_hat"] = e.theta_hat;
  rec["n_value"] = e.n_value;
  rec["qvar"] = e.qvar;
  rec["std_err"] = e.std_err;
  rec["std_err_nominal"] = e.std_err_nominal;
  rec["horizon"] = e.horizon;
  rec["diagnostics"] = diagnostics_json(e.diagnostics);
  return rec;
}

int cmd_estimate(const RunConfig& config, Sinks& sinks) {
  const SampledPath path = load_path(config);
  const HurstPair pair = pair_of(config);
  SolverOptions opts = solver_of(config, "solver_n");
  opts.compute_residual = false;
  const FredholmSolution sol = solve_hT(pair, path.horizon(), opts);
  const EstimateResult e =
      mle(path, pair, sol, config.number("sigma1"), config.number("sigma2"));
  // A single record: it is the data of this command.
  emit(*sinks.data, estimate_json(config, e));
  return 0;
}

int cmd_montecarlo(const RunConfig& config, Sinks& sinks) {
  const MonteCarloConfig mc = montecarlo_config(config);
  const MonteCarloRun run = run_montecarlo(mc);
  std::ostream& os = *sinks.data;
  os << config.provenance() << "\n" << "replication,theta_hat\n";
  for (std::size_t r = 0; r < run.theta_hat.size(); ++r) {
    os << r << ',' << format_double(run.theta_hat[r]) << '\n';
  }
  const auto& s = run.summary;
  Json rec = provenance_json(config);
  rec["replications"] = s.replications;
  rec["theta"] = s.theta;
  rec["horizon"] = s.horizon;
  rec["mean"] = s.mean;
  rec["sd"] = s.sd;
  rec["std_err_theory"] = s.std_err_theory;
  rec["std_err_nominal"] = s.std_err_nominal;
  rec["var_ratio"] = s.var_ratio;
  rec["var_ratio_nominal"] = s.var_ratio_nominal;
  rec["mse"] = s.mse;
  rec["scaled_mse"] = s.scaled_mse;
  rec["ks_statistic"] = s.ks.statistic;
  rec["ks_p_value"] = s.ks.p_value;
  rec["diagnostics"] = diagnostics_json(s.diagnostics);
  emit(*sinks.summary, rec);
  return 0;
}

int cmd_validate(const RunConfig& config, Sinks& sinks) {
  const auto checks = run_validate(config);
  std::ostream& os = *sinks.data;
  os << config.provenance() << "\n" << "check,status,value,tolerance\n";
  std::size_t failed = 0;
  for (const auto& c : checks) {
    os << c.name << ',' << (c.passed ? "pass" : "fail") << ',' << format_double(c.value) << ','
       << format_double(c.tolerance) << '\n';
    if (!c.passed) ++failed;
  }
  Json rec = provenance_json(config);
  rec["checks"] = checks.size();
  rec["failed"] = failed;
  emit(*sinks.summary, rec);
  return 0;
}

// ---------------------------------------------------------------- validate

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

CheckResult at_most(std::string name, double value, double tol) {
  return {std::move(name), value <= tol, value, tol};
}

}  // namespace

std::string to_string(Command command) {
  for (const auto& [name, c] : command_names()) {
    if (c == command) return name;
  }
  return "unknown";
}

bool RunConfig::has(const std::string& key) const { return params.count(key) > 0; }

std::string RunConfig::text(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw DomainError("missing required parameter " + flag_name(key));
  return it->second;
}

double RunConfig::number(const std::string& key) const {
  const std::string s = text(key);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || !std::isfinite(v)) {
    throw DomainError(flag_name(key) + ": not a finite number: '" + s + "'");
  }
  return v;
}

std::size_t RunConfig::count(const std::string& key) const {
  const double v = number(key);
  if (v < 0.0 || v != std::floor(v) || v > 1e15) {
    throw DomainError(flag_name(key) + ": expected a non-negative integer, got '" + text(key) + "'");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t RunConfig::seed() const {
  if (!has("seed")) throw DomainError("--seed is required for " + to_string(command));
  const std::string s = text("seed");
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-') {
    throw DomainError("--seed: expected an unsigned integer, got '" + s + "'");
  }
  return v;
}

std::string RunConfig::provenance() const {
  std::string line = std::string("# mfbm ") + kVersion + " command=" + to_string(command);
  for (const auto& [k, v] : params) {
    if (!is_plumbing(k)) line += " " + k + "=" + v;
  }
  return line;
}

std::map<std::string, std::string> read_config_file(const std::string& path, Command command) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::ParseError& e) {
    throw DomainError("config file " + path + ": " + e.what());
  }
  const auto specs = command_options(command);
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) {
      if (item.parents.size() != 1 || item.parents[0] != to_string(command)) continue;
    }
    const std::string key = normalize_key(item.name);
    const bool known = std::any_of(specs.begin(), specs.end(),
                                   [&](const OptionSpec& s) { return key == s.key; });
    if (!known) {
      throw DomainError("config file " + path + ": unknown key '" + item.name + "' for " +
                        to_string(command));
    }
    if (item.inputs.size() != 1) throw DomainError("config file " + path + ": key '" + key +
                                                   "' needs exactly one value");
    out[key] = item.inputs[0];
  }
  return out;
}

ParseOutcome parse_run_config(int argc, const char* const* argv) {
  CLI::App app{"Drift MLE for the mixed model X = theta t + sigma1 B^H1 + sigma2 B^H2"};
  app.footer(
      "Parameter precedence: command-line flags override values from --config FILE,\n"
      "which override built-in defaults. Config files hold 'key = value' lines;\n"
      "keys under a [command] section apply to that command only.\n"
      "Exit codes: 0 success, 1 domain or configuration error, 2 numeric failure.");
  app.set_version_flag("--version", std::string("mfbm ") + kVersion);
  app.require_subcommand(1);

  struct Slot {
    CLI::App* sub;
    Command command;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
  };
  std::vector<std::unique_ptr<Slot>> slots;
  for (const auto& [name, command] : command_names()) {
    auto slot = std::make_unique<Slot>();
    slot->command = command;
    slot->sub = app.add_subcommand(name, "");
    slot->sub->add_option("--config", slot->config_path, "TOML-style parameter file");
    for (const auto& spec : command_options(command)) {
      std::string help = spec.help;
      if (spec.fallback) help += std::string(" [default ") + spec.fallback + "]";
      slot->options[spec.key] = slot->sub->add_option(flag_name(spec.key), slot->values[spec.key], help);
    }
    slots.push_back(std::move(slot));
  }
  slots[0]->sub->description("kappa0 on a uniform (n+1)^2 grid of [0,T]^2 as CSV");
  slots[1]->sub->description("solve the Fredholm equation for h_T; CSV of (u, h)");
  slots[2]->sub->description("simulate observation paths; CSV of (time, value)");
  slots[3]->sub->description("read and check an external path CSV, write it in canonical form");
  slots[4]->sub->description("MLE of theta from a path CSV; one JSON record");
  slots[5]->sub->description("Monte Carlo study of the MLE; per-replication CSV and JSON summary");
  slots[6]->sub->description("cross-module invariant checks; CSV of (check, status, value, tolerance)");

  ParseOutcome outcome;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    outcome.exit_now = true;
    outcome.message = app.help();
    return outcome;
  } catch (const CLI::CallForVersion&) {
    outcome.exit_now = true;
    outcome.message = std::string("mfbm ") + kVersion + "\n";
    return outcome;
  } catch (const CLI::ParseError& e) {
    throw DomainError(e.what());
  }

  for (const auto& slot : slots) {
    if (!slot->sub->parsed()) continue;
    RunConfig& config = outcome.config;
    config.command = slot->command;
    for (const auto& spec : command_options(slot->command)) {
      if (spec.fallback) config.params[spec.key] = spec.fallback;
    }
    if (!slot->config_path.empty()) {
      for (const auto& [k, v] : read_config_file(slot->config_path, slot->command)) {
        config.params[k] = v;
      }
    }
    for (const auto& [key, opt] : slot->options) {
      if (opt->count() > 0) config.params[key] = slot->values[key];
    }
  }
  return outcome;
}

SampledPath read_path_csv(std::istream& in) {
  SampledPath path;
  std::string line;
  std::size_t lineno = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
      throw DomainError("path CSV line " + std::to_string(lineno) + ": expected time,value");
    }
    std::size_t pa = 0, pb = 0;
    double t = 0.0, v = 0.0;
    bool ok = true;
    try {
      t = std::stod(a, &pa);
      v = std::stod(b, &pb);
    } catch (const std::exception&) {
      ok = false;
    }
    auto trimmed_end = [](const std::string& s, std::size_t p) {
      return s.find_first_not_of(" \t", p) == std::string::npos;
    };
    ok = ok && trimmed_end(a, pa) && trimmed_end(b, pb);
    if (!ok) {
      if (header_allowed) {
        header_allowed = false;
        continue;
      }
      throw DomainError("path CSV line " + std::to_string(lineno) + ": not numeric");
    }
    header_allowed = false;
    if (!std::isfinite(t) || !std::isfinite(v)) {
      throw DomainError("path CSV line " + std::to_string(lineno) + ": non-finite value");
    }
    path.times.push_back(t);
    path.values.push_back(v);
  }
  if (path.times.size() < 2) throw DomainError("path CSV needs at least two rows");
  require_uniform(path.times);
  path.kind = PathKind::kX;
  return path;
}

void write_path_csv(std::ostream& out, const SampledPath& path, const std::string& header) {
  out << header << "\n" << "time,value\n";
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    out << format_double(path.times[k]) << ',' << format_double(path.values[k]) << '\n';
  }
}

MonteCarloConfig montecarlo_config(const RunConfig& config) {
  MonteCarloConfig mc;
  mc.model.theta = config.number("theta");
  mc.model.sigma1 = positive(config, "sigma1");
  mc.model.sigma2 = config.number("sigma2");
  if (mc.model.sigma2 < 0.0) throw DomainError("sigma2 must be non-negative");
  mc.model.hurst = pair_of(config);
  mc.model.seed = config.seed();
  mc.T = positive(config, "t");
  mc.grid_cells = config.count("n");
  if (mc.grid_cells < 1) throw DomainError("n must be at least 1");
  mc.replications = config.count("reps");
  if (mc.replications < 100) {
    throw DomainError("--reps must be at least 100, got " + config.text("reps"));
  }
  mc.solver = solver_of(config, "solver_n");
  mc.solver.compute_residual = false;
  mc.threads = static_cast<unsigned>(config.count("threads"));
  return mc;
}

std::vector<CheckResult> run_validate(const RunConfig& config) {
  const HurstPair pair = pair_of(config);
  std::mt19937_64 rng(config.seed());
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<CheckResult> checks;

  {
    const HurstPair half = HurstPair::make(0.5, pair.h2);
    const MixedKernel k(half);
    const double target = pair.h2 * (2.0 * pair.h2 - 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, std::abs(k.kappa0(unit(rng), unit(rng)) - target));
    checks.push_back(at_most("reduction_kappa0_half", worst, 1e-6));
  }

  const MixedKernel kernel(pair);
  const auto& c = kernel.constants();
  const double d = pair.gap();
  {
    const double closed = std::pow(c.beta_h2 * d * beta_fn(1.0 - pair.alpha1, pair.alpha2), 2) *
                          beta_fn(d, 1.0 - 2.0 * d);
    checks.push_back(at_most("diag_closed_form", rel(c.c_diag, closed), 1e-9));
    double spread = 0.0;
    for (double s : {0.1, 1.0, 7.0}) {
      spread = std::max(spread, std::abs(kernel.kappa0(s, s * (1.0 - 1e-15)) - c.c_diag));
    }
    checks.push_back(at_most("diag_constant", spread, 1e-6));
    double edge = 0.0;
    for (double s : {0.1, 1.0, 7.0}) {
      edge = std::max(edge, std::abs(kernel.kappa0(s, s * 1e-12) - c.c_edge));
      edge = std::max(edge, std::abs(kernel.kappa0(s * 1e-12, s) - c.c_edge));
    }
    checks.push_back(at_most("edge_limit", edge, 2e-6));
    // The two constants coincide exactly when H1 = 1/2.
    const double gap = rel(c.c_diag, c.c_edge);
    if (pair.h1 == 0.5) {
      checks.push_back(at_most("diag_edge_coincide", gap, 1e-10));
    } else {
      checks.push_back({"diag_edge_distinct", gap > 1e-3, gap, 1e-3});
    }
  }
  {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double s = unit(rng), u = unit(rng);
      if (std::abs(s - u) < 1e-3) continue;
      const double oracle = std::pow(u, 2.0 * pair.h1 - 1.0) * kernel.brute_force_k(s, u);
      worst = std::max(worst, rel(kernel.kappa(s, u), oracle));
    }
    checks.push_back(at_most("factorization_oracle", worst, 1e-4));
  }
  {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double T = 1.0;
    double worst = 0.0;
    for (double u : {0.05, 0.3, 0.5, 0.8, 1.0}) {
      // xc is the signed distance to the nearer endpoint; it keeps |s - u|
      // accurate next to the singularity.
      const double e = 2.0 * d - 1.0;
      auto left = [&](double s, double xc) {
        const double gap = xc > 0.0 ? xc : u - s;
        return std::pow(s / u, 1.0 - 2.0 * pair.h1) * std::pow(gap, e);
      };
      auto right = [&](double s, double xc) { return std::pow(xc < 0.0 ? -xc : s - u, e); };
      double q = ts.integrate(left, 0.0, u, 1e-14);
      if (u < T) q += ts.integrate(right, u, T, 1e-14);
      worst = std::max(worst, rel(q, phi_singular_integral(pair, u, T)));
    }
    checks.push_back(at_most("phi_integral_closed_form", worst, 1e-8));
  }
  {
    double worst_k0 = 0.0, worst_k = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double s = unit(rng), u = unit(rng);
      for (double a : {0.5, 2.0, 10.0}) {
        worst_k0 = std::max(worst_k0, std::abs(kernel.kappa0(a * s, a * u) - kernel.kappa0(s, u)));
        worst_k = std::max(worst_k,
                           rel(kernel.kappa(a * s, a * u) / kernel.kappa(s, u), std::pow(a, 2.0 * d - 1.0)));
      }
    }
    checks.push_back(at_most("kappa0_homogeneity", worst_k0, 1e-12));
    checks.push_back(at_most("kappa_scaling", worst_k, 1e-12));
  }
  {
    std::uniform_real_distribution<double> ua(0.1, 1.0), ub(0.2, 2.0), ux(0.0, 5.0);
    double worst_pfaff = 0.0, worst_unit = 0.0;
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
      const double a = ua(rng), b = ub(rng), c2 = b + 1.2 + ua(rng), x = ux(rng);
      const Hyp2F1 f(a, b, c2), g(a, c2 - b, c2);
      worst_pfaff = std::max(worst_pfaff, rel(f.euler(-x), std::pow(1.0 + x, -a) * g.euler(x / (1.0 + x))));
      const double unit_value = gamma_fn(c2) * gamma_fn(c2 - a - b) / (gamma_fn(c2 - a) * gamma_fn(c2 - b));
      worst_unit = std::max(worst_unit, rel(hyp2f1({a, b, c2, 1.0}), unit_value));
      const double bneg = 1.0 + ua(rng);
      if (!check_hyp_bounds({a, bneg, bneg + ua(rng), x}, BoundCase::kNegativeArgument).holds) ++violations;
      if (!check_hyp_bounds({a, b, c2, x / (1.0 + x)}, BoundCase::kPositiveArgument).holds) ++violations;
    }
    checks.push_back(at_most("pfaff_identity", worst_pfaff, 1e-9));
    checks.push_back(at_most("unit_argument_value", worst_unit, 1e-10));
    checks.push_back(at_most("hypergeometric_bounds", violations, 0.0));
  }
  {
    SolverOptions opts;
    opts.n = 128;
    opts.threads = static_cast<unsigned>(config.count("threads"));
    const auto ctx = make_context(pair);
    const FredholmSolution sol = solve_hT(ctx, 1.0, opts);
    checks.push_back(at_most("solver_residual", sol.residual_sup, 1e-6));

    SolverOptions scaled = opts;
    scaled.compute_residual = false;
    const FredholmSolution wide = solve_hT(ctx, 2.0, scaled);
    scaled.kernel_scale = std::pow(2.0, 2.0 * d);
    const FredholmSolution unit_sol = solve_hT(ctx, 1.0, scaled);
    double worst = 0.0;
    for (int i = 0; i <= 50; ++i) {
      const double u = i / 50.0;
      worst = std::max(worst, std::abs(wide.evaluate(2.0 * u) - unit_sol.evaluate(u)));
    }
    checks.push_back(at_most("scale_covariance", worst, 1e-5));

    const auto grid = uniform_grid(1.0, 256);
    SampledPath drift;
    drift.times = grid;
    drift.values = grid;
    const EstimateResult e = mle(drift, pair, sol);
    checks.push_back(at_most("drift_recovery", std::abs(e.theta_hat - 1.0), 1e-3));
  }
  return checks;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Sinks sinks(config, out, err);
  switch (config.command) {
    case Command::kKernelGrid: return cmd_kernel_grid(config, sinks);
    case Command::kSolve: return cmd_solve(config, sinks);
    case Command::kSimulate: return cmd_simulate(config, sinks);
    case Command::kIngest: return cmd_ingest(config, sinks);
    case Command::kEstimate: return cmd_estimate(config, sinks);
    case Command::kMonteCarlo: return cmd_montecarlo(config, sinks);
    case Command::kValidate: return cmd_validate(config, sinks);
  }
  return 1;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const ParseOutcome parsed = parse_run_config(argc, argv);
    if (parsed.exit_now) {
      out << parsed.message;
      return parsed.exit_code;
    }
    return run(parsed.config, out, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mfbm::cli
