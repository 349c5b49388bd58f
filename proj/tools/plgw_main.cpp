#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "plgw/artifacts.hpp"
#include "plgw/barenblatt.hpp"
#include "plgw/config.hpp"
#include "plgw/constitutive.hpp"
#include "plgw/lawfit.hpp"
#include "plgw/principles.hpp"
#include "plgw/solver.hpp"
#include "plgw/version.hpp"

namespace {

using nlohmann::json;
using namespace plgw;

std::string out_root() {
  const char* env = std::getenv("PLGW_OUT_ROOT");
  return env ? std::string(env) : std::string();
}

std::string resolve_path(const std::string& path) {
  if (path.empty()) return path;
  const std::string root = out_root();
  if (root.empty() || path.front() == '/') return path;
  return root + "/" + path;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (path.empty() || suffix.empty()) return path;
  const size_t dot = path.find_last_of('.');
  const size_t slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

struct CommandResult {
  json key_results = json::object();
  std::vector<std::string> artifacts;
};

using ParamMap = std::map<std::string, double*>;

CommandResult run_solve_like(const std::string& command, const SolveSetup& setup_in,
                             const json& details, const std::string& echo,
                             const std::string& suffix) {
  SolveSetup setup = setup_in;
  Trajectory traj =
      setup.problem.domain.kind() == Domain::Kind::rectangle
          ? solve(setup.problem, {setup.resolution_x, setup.resolution_y}, setup.numerics)
          : solve(setup.problem, setup.resolution_x, setup.numerics);
  CommandResult res;
  if (!setup.trajectory_path.empty()) {
    const std::string path = resolve_path(with_suffix(setup.trajectory_path, suffix));
    write_trajectory_csv(path, traj, echo);
    res.artifacts.push_back(path);
  }
  if (!setup.manifest_path.empty()) {
    json manifest = run_manifest(command, echo, traj);
    if (!details.is_null()) manifest["scenario"] = details;
    const std::string path = resolve_path(with_suffix(setup.manifest_path, suffix));
    write_json(path, manifest);
    res.artifacts.push_back(path);
  }
  res.key_results["final_time"] = traj.times.back();
  res.key_results["steps"] = traj.steps.size();
  res.key_results["mass_final"] = traj.steps.empty() ? 0.0 : traj.steps.back().mass;
  res.key_results["support_final"] = traj.steps.empty() ? 0.0 : traj.steps.back().support;
  if (!details.is_null()) res.key_results["scenario"] = details;
  return res;
}

struct FitArgs {
  std::string data = "spic-2d";
  std::string law = "power";
  std::string out;
  double rho = 1000.0;
  double g = 9.8066;
};

CommandResult run_fit(const FitArgs& a, const std::string& echo, const std::string& suffix) {
  const FlowDataset ds = load_dataset(a.data);
  if (a.law != "darcy" && a.law != "power")
    throw std::invalid_argument("fit: --law must be darcy or power");
  FitResult fit = a.law == "darcy" ? fit_darcy(ds) : fit_power(ds);
  CommandResult res;
  json report = fit.to_json();
  if (ds.A_inlet > 0.0) {
    const AquiferLaw law = derive_aquifer_law(fit, ds.A_inlet, a.rho, a.g);
    report["aquifer_law"] = law.to_json();
    if (ds.phi_eff > 0.0)
      report["groundwater_pde"] = build_groundwater_pde(law, ds.phi_eff).to_json();
  }
  report["version"] = kVersion;
  report["config_echo"] = echo;
  if (!a.out.empty()) {
    const std::string path = resolve_path(with_suffix(a.out, suffix));
    write_json(path, report);
    res.artifacts.push_back(path);
  }
  res.key_results = report;
  res.key_results.erase("residuals");
  res.key_results.erase("trace");
  return res;
}

struct BarenblattArgs {
  int n = 1;
  double k = 1.0;
  double p = 3.0;
  double t = 1.0;
  std::string normalization = "solution";
  double C = 1.0;
  int samples = 512;
  std::string out;
  std::string solution_out;
};

CommandResult run_barenblatt(const BarenblattArgs& a, const std::string& echo,
                             const std::string& suffix) {
  MassNormalization mode = MassNormalization::solution_mass;
  if (a.normalization == "conserved")
    mode = MassNormalization::conserved_mass;
  else if (a.normalization == "explicit")
    mode = MassNormalization::explicit_c;
  else if (a.normalization != "solution")
    throw std::invalid_argument("barenblatt: normalization must be solution, conserved, or explicit");
  SelfSimilarSolution sol(a.n, a.k, a.p, mode, a.C);
  CommandResult res;
  const double s_end = sol.regime() == Regime::compact ? sol.profile_support_end() * 1.05
                                                       : 4.0 * (1.0 + 1.0 / sol.lambda());
  if (!a.out.empty()) {
    std::vector<std::pair<double, double>> rows;
    rows.reserve(a.samples);
    for (int i = 0; i < a.samples; ++i) {
      const double s = s_end * i / (a.samples - 1);
      rows.emplace_back(s, sol.profile(s));
    }
    const std::string path = resolve_path(with_suffix(a.out, suffix));
    write_pairs_csv(path, "s,B", rows, echo);
    res.artifacts.push_back(path);
  }
  if (!a.solution_out.empty()) {
    std::vector<std::vector<double>> rows;
    const double r_end = s_end * std::pow(a.t, sol.lambda());
    for (int i = 0; i < a.samples; ++i) {
      const double r = r_end * i / (a.samples - 1);
      rows.push_back({r, a.t, sol.value(r, a.t)});
    }
    const std::string path = resolve_path(with_suffix(a.solution_out, suffix));
    write_table_csv(path, "r,t,w", rows, echo);
    res.artifacts.push_back(path);
  }
  res.key_results = json{{"N", a.n},
                         {"k", a.k},
                         {"p", a.p},
                         {"regime", to_string(sol.regime())},
                         {"lambda", sol.lambda()},
                         {"mu", sol.mu()},
                         {"gamma_exp", sol.gamma_exp()},
                         {"kappa", sol.kappa()},
                         {"C", sol.C()}};
  if (sol.regime() == Regime::compact) res.key_results["front_radius"] = sol.front_radius(a.t);
  return res;
}

struct SmpCheckArgs {
  std::string b_kind = "identity";
  double p = 1.5;
  double scale = 1.0, k = 2.0;
  double phi = 0.0347, H = 1.0;
};

BFunction b_from_kind(const std::string& kind, double scale, double k, double phi, double p,
                      double H) {
  if (kind == "identity") return BFunction::identity();
  if (kind == "power_root") return BFunction::power_root(scale, k);
  if (kind == "aquifer_head") return BFunction::aquifer_head(phi, p, H);
  if (kind == "leibenson") return BFunction::leibenson();
  throw std::invalid_argument("unknown b kind: " + kind);
}

CommandResult run_smp_check(const SmpCheckArgs& a) {
  const BFunction b = b_from_kind(a.b_kind, a.scale, a.k, a.phi, a.p, a.H);
  CommandResult res;
  res.key_results =
      json{{"b", b.describe()}, {"p", a.p}, {"verdict", to_string(smp_condition(b, a.p))}};
  return res;
}

struct SmpCounterArgs {
  double p = 3.0, beta = 4.0, gamma = 4.0;
  std::string b_kind = "identity";
  double phi = 0.0347, H = 1.0, scale = 1.0, k = 2.0;
  double horizon = 0.0;  // 0: use t0
  int resolution = 801;
  double dt = 0.0;  // 0: horizon / 400
  std::string out;
};

CommandResult run_smp_counterexample(const SmpCounterArgs& a, const std::string& echo,
                                     const std::string& suffix) {
  SmpCounterexample ce(a.p, a.beta, a.gamma,
                       b_from_kind(a.b_kind, a.scale, a.k, a.phi, a.p, a.H), 1.0);
  const double t0 = positivity_horizon(ce);
  const double horizon = a.horizon > 0.0 ? a.horizon : t0;
  SolverSettings settings;
  settings.resolution = a.resolution;
  settings.numerics.dt = a.dt > 0.0 ? a.dt : horizon / 400.0;
  settings.numerics.snapshot_every = 16;
  SmpFailureReport rep = demonstrate_smp_failure(ce, settings, horizon);
  CommandResult res;
  json report = rep.to_json();
  report["version"] = kVersion;
  report["config_echo"] = echo;
  if (!a.out.empty()) {
    const std::string path = resolve_path(with_suffix(a.out, suffix));
    write_json(path, report);
    res.artifacts.push_back(path);
  }
  res.key_results = rep.to_json();
  return res;
}

struct ScpArgs {
  double p = 5.0, alpha = 2.0, beta = 3.0, C = 0.05;
  double horizon = 0.004;
  int resolution = 2001;
  double dt = 0.0;
  std::string out;
};

CommandResult run_scp(const ScpArgs& a, const std::string& echo, const std::string& suffix) {
  const double gamma = a.beta - a.alpha;
  auto psi1 = [](double, double, double) { return 0.0; };
  auto psi2 = [beta = a.beta, gamma](double x, double, double) {
    if (x <= 0.0) return 0.0;
    return 0.5 * std::pow(x, beta) * (1.0 - std::pow(x, gamma));
  };
  ScpInstance inst(a.p, a.alpha, a.beta, a.C, BFunction::identity(), psi1, psi2);
  SolverSettings settings;
  settings.resolution = a.resolution;
  settings.numerics.dt = a.dt > 0.0 ? a.dt : a.horizon / 100.0;
  WaitingTimeReport rep = demonstrate_waiting_time(inst, settings, a.horizon);
  CommandResult res;
  json report = rep.to_json();
  report["version"] = kVersion;
  report["config_echo"] = echo;
  if (!a.out.empty()) {
    const std::string path = resolve_path(with_suffix(a.out, suffix));
    write_json(path, report);
    res.artifacts.push_back(path);
  }
  res.key_results = rep.to_json();
  return res;
}

struct PlotArgs {
  std::string trajectory;
  std::string manifest;
  std::string series = "mass";
  double time = 0.0;
  std::string out = "plot.dat";
};

CommandResult run_plot_data(const PlotArgs& a) {
  CommandResult res;
  std::vector<std::vector<double>> rows;
  std::string comment;
  if (!a.trajectory.empty()) {
    std::istringstream in(read_text_file(a.trajectory));
    std::string line;
    bool header = false;
    int cols = 3;
    double best_t = 0.0, best_err = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> all;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header) {
        header = true;
        cols = line == "t,x,y,u" ? 4 : 3;
        continue;
      }
      std::istringstream row(line);
      std::vector<double> vals;
      std::string tok;
      while (std::getline(row, tok, ',')) vals.push_back(std::stod(tok));
      if (static_cast<int>(vals.size()) != cols) continue;
      const double err = std::abs(vals[0] - a.time);
      if (err < best_err) {
        best_err = err;
        best_t = vals[0];
      }
      all.push_back(std::move(vals));
    }
    for (const auto& vals : all)
      if (vals[0] == best_t) rows.push_back(std::vector<double>(vals.begin() + 1, vals.end()));
    comment = "slice at t=" + format_double(best_t) + " from " + a.trajectory;
    res.key_results["time"] = best_t;
  } else if (!a.manifest.empty()) {
    const json manifest = json::parse(read_text_file(a.manifest));
    const std::string key = a.series + "_series";
    if (!manifest.contains(key))
      throw std::invalid_argument("plot-data: manifest lacks series " + a.series);
    for (const auto& pair : manifest[key])
      rows.push_back({pair[0].get<double>(), pair[1].get<double>()});
    comment = a.series + " series from " + a.manifest;
    res.key_results["series"] = a.series;
  } else {
    throw std::invalid_argument("plot-data: need --trajectory or --manifest");
  }
  const std::string path = resolve_path(a.out);
  write_columns_txt(path, rows, comment);
  res.artifacts.push_back(path);
  res.key_results["rows"] = rows.size();
  return res;
}

int emit(const std::string& command, const char* status, const CommandResult& res) {
  json summary{{"command", command},
               {"status", status},
               {"key_results", res.key_results},
               {"artifact_paths", res.artifacts}};
  std::cout << summary.dump() << std::endl;
  return 0;
}

int emit_error(const std::string& command, int code, const std::string& message) {
  json summary{{"command", command},
               {"status", code == 1 ? "validation-error" : "numerical-error"},
               {"key_results", json{{"error", message}}},
               {"artifact_paths", json::array()}};
  std::cout << summary.dump() << std::endl;
  return code;
}

bool parse_sweep(const std::string& spec, std::string& key, std::vector<double>& values) {
  const size_t eq = spec.find('=');
  if (eq == std::string::npos) return false;
  key = spec.substr(0, eq);
  std::istringstream in(spec.substr(eq + 1));
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      values.push_back(std::stod(tok));
    } catch (const std::exception&) {
      return false;
    }
  }
  return !values.empty() && !key.empty();
}

/// Runs the command once, or fans it out over the swept parameter. Sweep runs
/// execute concurrently on copies of the argument pack captured by `make_runner`,
/// so artifact naming and results stay deterministic per value.
int run_command(const std::string& command, const std::string& sweep_spec, const ParamMap& params,
                const std::string& echo_base,
                const std::function<std::function<CommandResult(const std::string&,
                                                                const std::string&)>()>& make_runner) {
  if (sweep_spec.empty()) {
    try {
      auto runner = make_runner();
      return emit(command, "ok", runner(echo_base, ""));
    } catch (const ConfigError& e) {
      return emit_error(command, 1, e.what());
    } catch (const std::invalid_argument& e) {
      return emit_error(command, 1, e.what());
    } catch (const SolveFailure& e) {
      return emit_error(command, 2, e.what());
    } catch (const std::exception& e) {
      return emit_error(command, 2, e.what());
    }
  }
  std::string key;
  std::vector<double> values;
  if (!parse_sweep(sweep_spec, key, values))
    return emit_error(command, 1, "malformed --sweep, expected key=v1,v2,...");
  auto it = params.find(key);
  if (it == params.end())
    return emit_error(command, 1, "--sweep key '" + key + "' is not sweepable for this command");
  std::vector<std::future<json>> futures;
  for (double v : values) {
    *it->second = v;  // set before capturing the runner, which copies its args
    auto runner = make_runner();
    const std::string suffix = "-" + key + "=" + format_double(v);
    const std::string echo = echo_base + "\nsweep: " + key + " = " + format_double(v);
    futures.push_back(std::async(std::launch::async, [runner, echo, suffix, v]() -> json {
      try {
        const CommandResult r = runner(echo, suffix);
        return json{{"value", v},
                    {"status", "ok"},
                    {"key_results", r.key_results},
                    {"artifact_paths", r.artifacts}};
      } catch (const std::exception& e) {
        return json{{"value", v}, {"status", "error"}, {"error", e.what()}};
      }
    }));
  }
  json runs = json::array();
  bool any_error = false;
  for (auto& f : futures) {
    json r = f.get();
    any_error = any_error || r["status"] != "ok";
    runs.push_back(std::move(r));
  }
  json summary{{"command", command},
               {"status", any_error ? "partial" : "ok"},
               {"key_results", json{{"sweep", key}, {"runs", runs}}},
               {"artifact_paths", json::array()}};
  std::cout << summary.dump() << std::endl;
  return any_error ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-Laplacian groundwater toolkit"};
  app.set_version_flag("--version", std::string("plgw ") + kVersion);
  app.require_subcommand(1);
  std::string sweep_spec;
  app.add_option("--sweep", sweep_spec, "fan out runs over key=v1,v2,...");

  std::string solve_config;
  auto* cmd_solve = app.add_subcommand("solve", "solve a configured problem");
  cmd_solve->add_option("--config", solve_config, "run configuration file")->required();

  std::string scenario_config;
  auto* cmd_scenario = app.add_subcommand("scenario", "run a scenario preset");
  cmd_scenario->add_option("--config", scenario_config, "scenario configuration file")->required();

  FitArgs fit_args;
  auto* cmd_fit = app.add_subcommand("fit", "fit a constitutive law to a flow dataset");
  cmd_fit->add_option("--data", fit_args.data, "embedded id (spic-2d, spic-3d) or CSV path");
  cmd_fit->add_option("--law", fit_args.law, "darcy or power");
  cmd_fit->add_option("--out", fit_args.out, "fit report JSON path");
  cmd_fit->add_option("--rho", fit_args.rho, "water density kg/m^3");
  cmd_fit->add_option("--g", fit_args.g, "gravitational acceleration m/s^2");

  BarenblattArgs bb_args;
  auto* cmd_bb = app.add_subcommand("barenblatt", "evaluate a self-similar solution");
  cmd_bb->add_option("--n", bb_args.n, "spatial dimension N");
  cmd_bb->add_option("--k", bb_args.k, "time nonlinearity exponent k");
  cmd_bb->add_option("--p", bb_args.p, "p-Laplacian exponent");
  cmd_bb->add_option("--t", bb_args.t, "evaluation time");
  cmd_bb->add_option("--normalization", bb_args.normalization, "solution | conserved | explicit");
  cmd_bb->add_option("--C", bb_args.C, "profile constant for explicit normalization");
  cmd_bb->add_option("--samples", bb_args.samples, "profile sample count");
  cmd_bb->add_option("--out", bb_args.out, "profile CSV path (s,B)");
  cmd_bb->add_option("--solution-out", bb_args.solution_out, "solution column file (r t w)");

  SmpCheckArgs smp_args;
  auto* cmd_smp =
      app.add_subcommand("smp-check", "evaluate the strong-maximum-principle condition");
  cmd_smp->add_option("--b", smp_args.b_kind, "identity | power_root | aquifer_head | leibenson");
  cmd_smp->add_option("--p", smp_args.p, "exponent in (1,2)");
  cmd_smp->add_option("--scale", smp_args.scale, "power_root scale");
  cmd_smp->add_option("--k", smp_args.k, "power_root k");
  cmd_smp->add_option("--phi", smp_args.phi, "aquifer_head porosity");
  cmd_smp->add_option("--H", smp_args.H, "aquifer_head depth (m)");

  SmpCounterArgs smpc_args;
  auto* cmd_smpc = app.add_subcommand("smp-counterexample",
                                      "demonstrate the failure of the strong maximum principle");
  cmd_smpc->add_option("--p", smpc_args.p, "exponent > 2");
  cmd_smpc->add_option("--beta", smpc_args.beta, "profile exponent beta");
  cmd_smpc->add_option("--gamma", smpc_args.gamma, "profile exponent gamma");
  cmd_smpc->add_option("--b", smpc_args.b_kind, "identity | aquifer_head");
  cmd_smpc->add_option("--phi", smpc_args.phi, "aquifer_head porosity");
  cmd_smpc->add_option("--H", smpc_args.H, "aquifer_head depth (m)");
  cmd_smpc->add_option("--horizon", smpc_args.horizon, "time horizon (default: t0)");
  cmd_smpc->add_option("--resolution", smpc_args.resolution, "grid nodes");
  cmd_smpc->add_option("--dt", smpc_args.dt, "time step");
  cmd_smpc->add_option("--out", smpc_args.out, "report JSON path");

  ScpArgs scp_args;
  auto* cmd_scp = app.add_subcommand("scp-waiting-time",
                                     "demonstrate the waiting time at the degeneracy point");
  cmd_scp->add_option("--p", scp_args.p, "exponent > 2");
  cmd_scp->add_option("--alpha", scp_args.alpha, "stationary exponent alpha");
  cmd_scp->add_option("--beta", scp_args.beta, "perturbation exponent beta");
  cmd_scp->add_option("--C", scp_args.C, "smallness constant C");
  cmd_scp->add_option("--horizon", scp_args.horizon, "time horizon");
  cmd_scp->add_option("--resolution", scp_args.resolution, "grid nodes (odd)");
  cmd_scp->add_option("--dt", scp_args.dt, "time step");
  cmd_scp->add_option("--out", scp_args.out, "report JSON path");

  PlotArgs plot_args;
  auto* cmd_plot = app.add_subcommand("plot-data", "extract plain plotting columns from artifacts");
  cmd_plot->add_option("--trajectory", plot_args.trajectory, "trajectory CSV to slice");
  cmd_plot->add_option("--time", plot_args.time, "slice time");
  cmd_plot->add_option("--manifest", plot_args.manifest, "run manifest JSON");
  cmd_plot->add_option("--series", plot_args.series, "mass | support");
  cmd_plot->add_option("--out", plot_args.out, "output column file");

  CLI11_PARSE(app, argc, argv);

  if (cmd_solve->parsed()) {
    return run_command("solve", sweep_spec, {}, "command: solve\nconfig: " + solve_config, [&]() {
      return [solve_config](const std::string&, const std::string& suffix) {
        const RunConfig cfg = RunConfig::parse(read_text_file(solve_config));
        const SolveSetup setup = solve_setup_from_config(cfg);
        return run_solve_like("solve", setup, json(), cfg.raw_text(), suffix);
      };
    });
  }
  if (cmd_scenario->parsed()) {
    return run_command("scenario", sweep_spec, {},
                       "command: scenario\nconfig: " + scenario_config, [&]() {
                         return [scenario_config](const std::string&, const std::string& suffix) {
                           const RunConfig cfg = RunConfig::parse(read_text_file(scenario_config));
                           ScenarioExpansion exp = expand_scenario(cfg);
                           return run_solve_like("scenario", exp.setup, exp.details,
                                                 cfg.raw_text(), suffix);
                         };
                       });
  }
  if (cmd_fit->parsed()) {
    ParamMap params{{"rho", &fit_args.rho}, {"g", &fit_args.g}};
    const std::string echo = "command: fit\ndata: " + fit_args.data + "\nlaw: " + fit_args.law;
    return run_command("fit", sweep_spec, params, echo, [&]() {
      FitArgs copy = fit_args;
      return [copy](const std::string& e, const std::string& suffix) {
        return run_fit(copy, e, suffix);
      };
    });
  }
  if (cmd_bb->parsed()) {
    double n_as_double = bb_args.n;
    ParamMap params{{"k", &bb_args.k},
                    {"p", &bb_args.p},
                    {"t", &bb_args.t},
                    {"C", &bb_args.C},
                    {"n", &n_as_double}};
    std::ostringstream echo;
    echo << "command: barenblatt\nn: " << bb_args.n << "\nk: " << bb_args.k << "\np: " << bb_args.p
         << "\nt: " << bb_args.t << "\nnormalization: " << bb_args.normalization;
    return run_command("barenblatt", sweep_spec, params, echo.str(), [&]() {
      bb_args.n = static_cast<int>(n_as_double);
      BarenblattArgs copy = bb_args;
      return [copy](const std::string& e, const std::string& suffix) {
        return run_barenblatt(copy, e, suffix);
      };
    });
  }
  if (cmd_smp->parsed()) {
    ParamMap params{{"p", &smp_args.p}, {"k", &smp_args.k}, {"H", &smp_args.H}};
    return run_command("smp-check", sweep_spec, params, "command: smp-check", [&]() {
      SmpCheckArgs copy = smp_args;
      return [copy](const std::string&, const std::string&) { return run_smp_check(copy); };
    });
  }
  if (cmd_smpc->parsed()) {
    ParamMap params{{"p", &smpc_args.p}, {"beta", &smpc_args.beta}, {"gamma", &smpc_args.gamma}};
    std::ostringstream echo;
    echo << "command: smp-counterexample\np: " << smpc_args.p << "\nbeta: " << smpc_args.beta
         << "\ngamma: " << smpc_args.gamma << "\nb: " << smpc_args.b_kind;
    return run_command("smp-counterexample", sweep_spec, params, echo.str(), [&]() {
      SmpCounterArgs copy = smpc_args;
      return [copy](const std::string& e, const std::string& suffix) {
        return run_smp_counterexample(copy, e, suffix);
      };
    });
  }
  if (cmd_scp->parsed()) {
    ParamMap params{{"p", &scp_args.p},
                    {"alpha", &scp_args.alpha},
                    {"beta", &scp_args.beta},
                    {"C", &scp_args.C},
                    {"horizon", &scp_args.horizon}};
    std::ostringstream echo;
    echo << "command: scp-waiting-time\np: " << scp_args.p << "\nalpha: " << scp_args.alpha
         << "\nbeta: " << scp_args.beta << "\nC: " << scp_args.C;
    return run_command("scp-waiting-time", sweep_spec, params, echo.str(), [&]() {
      ScpArgs copy = scp_args;
      return [copy](const std::string& e, const std::string& suffix) {
        return run_scp(copy, e, suffix);
      };
    });
  }
  if (cmd_plot->parsed()) {
    ParamMap params{{"time", &plot_args.time}};
    return run_command("plot-data", sweep_spec, params, "command: plot-data", [&]() {
      PlotArgs copy = plot_args;
      return [copy](const std::string&, const std::string&) { return run_plot_data(copy); };
    });
  }
  return 0;
}
