// vibroq — two coupled vibrational modes between two thermal baths:
// closed-form Gaussian dynamics, a truncated-Fock integration cross-check,
// time-scale and eigenstructure analysis, and heat/energy reports.
//
// Exit codes: 0 success, 1 oracle deviation above tolerance,
//             2 invalid input, 3 I/O failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vibroq/analysis.hpp"
#include "vibroq/csv.hpp"
#include "vibroq/errors.hpp"
#include "vibroq/fock.hpp"
#include "vibroq/gaussian.hpp"
#include "vibroq/scenarios.hpp"
#include "vibroq/thermo.hpp"
#include "vibroq/units.hpp"

using namespace vibroq;
using json = nlohmann::json;

namespace {

struct RunConfig {
  std::string scenario = "custom";
  model::PhysicalParams params;
  double t_max_fs = 500.0;
  double dt_fs = 0.1;
  bool secular = false;
  int cutoff = 10;
  double rtol = 1e-3;
  std::string out;

  // sweep and grid extensions
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::string sweep_param2;
  std::vector<double> sweep_values2;
  std::string selector = "t2";
  double delta_min_ev = 0.0, delta_max_ev = 0.3;
  int delta_steps = 50;
  double deps_min_ev = 0.0, deps_max_ev = 0.3;
  int deps_steps = 50;
  bool endpoints = false; // heat: also report the two coupling-dial endpoints
};

struct CliOverrides {
  std::optional<std::string> scenario, config_path, out, sweep_param, sweep_param2,
      selector, sweep_values, sweep_values2;
  std::optional<double> eps1, eps2, delta, gamma, temp1, temp2, adiabatic, t_max, dt,
      rtol, delta_min, delta_max, deps_min, deps_max;
  std::optional<int> cutoff, delta_steps, deps_steps;
  bool secular = false;
  bool endpoints = false;
};

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    values.push_back(std::stod(item, &used));
    if (used != item.size()) {
      throw std::invalid_argument("malformed number '" + item + "' in value list");
    }
  }
  if (values.empty()) {
    throw std::invalid_argument("empty value list");
  }
  return values;
}

void apply_json(RunConfig& cfg, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") {
      cfg.scenario = value.get<std::string>();
    } else if (key == "eps1_ev") {
      cfg.params.eps1_ev = value.get<double>();
    } else if (key == "eps2_ev") {
      cfg.params.eps2_ev = value.get<double>();
    } else if (key == "delta_ev") {
      cfg.params.delta_ev = value.get<double>();
    } else if (key == "gamma_psinv") {
      cfg.params.gamma_psinv = value.get<double>();
    } else if (key == "temp1_k") {
      cfg.params.temp1_k = value.get<double>();
    } else if (key == "temp2_k") {
      cfg.params.temp2_k = value.get<double>();
    } else if (key == "adiabatic") {
      cfg.params.adiabatic = value.get<double>();
    } else if (key == "t_max_fs") {
      cfg.t_max_fs = value.get<double>();
    } else if (key == "dt_fs") {
      cfg.dt_fs = value.get<double>();
    } else if (key == "secular") {
      cfg.secular = value.get<bool>();
    } else if (key == "cutoff") {
      cfg.cutoff = value.get<int>();
    } else if (key == "rtol") {
      cfg.rtol = value.get<double>();
    } else if (key == "out") {
      cfg.out = value.get<std::string>();
    } else if (key == "sweep_param") {
      cfg.sweep_param = value.get<std::string>();
    } else if (key == "sweep_values") {
      cfg.sweep_values = value.get<std::vector<double>>();
    } else if (key == "sweep_param2") {
      cfg.sweep_param2 = value.get<std::string>();
    } else if (key == "sweep_values2") {
      cfg.sweep_values2 = value.get<std::vector<double>>();
    } else if (key == "selector") {
      cfg.selector = value.get<std::string>();
    } else if (key == "delta_min_ev") {
      cfg.delta_min_ev = value.get<double>();
    } else if (key == "delta_max_ev") {
      cfg.delta_max_ev = value.get<double>();
    } else if (key == "delta_steps") {
      cfg.delta_steps = value.get<int>();
    } else if (key == "deps_min_ev") {
      cfg.deps_min_ev = value.get<double>();
    } else if (key == "deps_max_ev") {
      cfg.deps_max_ev = value.get<double>();
    } else if (key == "deps_steps") {
      cfg.deps_steps = value.get<int>();
    } else if (key == "endpoints") {
      cfg.endpoints = value.get<bool>();
    } else {
      // silent typos in physics parameters are the worst failure mode
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
}

RunConfig resolve_config(const CliOverrides& o, const std::string& default_out) {
  std::string scenario_name = "custom";
  json config_doc;
  if (o.config_path) {
    std::ifstream in(*o.config_path);
    if (!in) {
      throw std::ios_base::failure("cannot open config file '" + *o.config_path + "'");
    }
    config_doc = json::parse(in);
    if (!config_doc.is_object()) {
      throw std::invalid_argument("config file must hold a JSON object");
    }
    if (config_doc.contains("scenario")) {
      scenario_name = config_doc["scenario"].get<std::string>();
    }
  }
  if (o.scenario) {
    scenario_name = *o.scenario;
  }

  const scenarios::Scenario scen = scenarios::get(scenario_name);
  RunConfig cfg;
  cfg.scenario = scenario_name;
  cfg.params = scen.params;
  cfg.t_max_fs = scen.t_max_fs;
  cfg.dt_fs = scen.dt_fs;
  cfg.out = default_out;

  if (!config_doc.is_null()) {
    apply_json(cfg, config_doc);
  }
  cfg.scenario = scenario_name;

  if (o.eps1) cfg.params.eps1_ev = *o.eps1;
  if (o.eps2) cfg.params.eps2_ev = *o.eps2;
  if (o.delta) cfg.params.delta_ev = *o.delta;
  if (o.gamma) cfg.params.gamma_psinv = *o.gamma;
  if (o.temp1) cfg.params.temp1_k = *o.temp1;
  if (o.temp2) cfg.params.temp2_k = *o.temp2;
  if (o.adiabatic) cfg.params.adiabatic = *o.adiabatic;
  if (o.t_max) cfg.t_max_fs = *o.t_max;
  if (o.dt) cfg.dt_fs = *o.dt;
  if (o.cutoff) cfg.cutoff = *o.cutoff;
  if (o.rtol) cfg.rtol = *o.rtol;
  if (o.out) cfg.out = *o.out;
  if (o.secular) cfg.secular = true;
  if (o.endpoints) cfg.endpoints = true;
  if (o.sweep_param) cfg.sweep_param = *o.sweep_param;
  if (o.sweep_values) cfg.sweep_values = parse_value_list(*o.sweep_values);
  if (o.sweep_param2) cfg.sweep_param2 = *o.sweep_param2;
  if (o.sweep_values2) cfg.sweep_values2 = parse_value_list(*o.sweep_values2);
  if (o.selector) cfg.selector = *o.selector;
  if (o.delta_min) cfg.delta_min_ev = *o.delta_min;
  if (o.delta_max) cfg.delta_max_ev = *o.delta_max;
  if (o.delta_steps) cfg.delta_steps = *o.delta_steps;
  if (o.deps_min) cfg.deps_min_ev = *o.deps_min;
  if (o.deps_max) cfg.deps_max_ev = *o.deps_max;
  if (o.deps_steps) cfg.deps_steps = *o.deps_steps;

  if (cfg.secular) {
    cfg.params.adiabatic = 0.0;
  }
  cfg.params.validate();
  if (!(cfg.dt_fs > 0.0) || !(cfg.t_max_fs > 0.0)) {
    throw std::invalid_argument("grid settings must be positive");
  }
  if (cfg.cutoff < 1) {
    throw std::invalid_argument("cutoff must be >= 1");
  }
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::ios_base::failure("cannot open output file '" + path + "'");
  }
  return out;
}

std::string format_timescale(const std::optional<double>& t_fs) {
  if (!t_fs) {
    return "--";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1ffs", *t_fs);
  return buf;
}

analysis::Selector parse_selector(const std::string& name) {
  if (name == "t1") return analysis::Selector::T1;
  if (name == "t2") return analysis::Selector::T2;
  if (name == "t2_over_t1") return analysis::Selector::T2OverT1;
  if (name == "f") return analysis::Selector::F;
  if (name == "three_minus_f") return analysis::Selector::ThreeMinusF;
  if (name == "q") return analysis::Selector::Q;
  if (name == "coherence_trace") return analysis::Selector::CoherenceTrace;
  throw std::invalid_argument("unknown selector '" + name + "'");
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) {
    throw std::invalid_argument("grid needs at least one point");
  }
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = (n == 1) ? lo : lo + (hi - lo) * double(i) / double(n - 1);
  }
  return v;
}

int cmd_simulate(const RunConfig& cfg) {
  const auto grid = gaussian::uniform_grid(cfg.t_max_fs * 1e-3, cfg.dt_fs * 1e-3);
  const auto traj = gaussian::propagate_moments(cfg.params, grid);
  auto out = open_output(cfg.out);
  io::write_trajectory_csv(out, traj);
  if (!out) {
    throw std::ios_base::failure("write failed for '" + cfg.out + "'");
  }
  std::cout << "wrote " << traj.samples.size() << " samples to " << cfg.out << "\n";
  return 0;
}

int cmd_timescales(const RunConfig& cfg) {
  const auto grid = gaussian::uniform_grid(cfg.t_max_fs * 1e-3, cfg.dt_fs * 1e-3);
  const auto traj = gaussian::propagate_moments(cfg.params, grid);
  const auto report = analysis::extract_timescales(traj);
  std::cout << "t1=" << format_timescale(report.t1_fs)
            << ", t2=" << format_timescale(report.t2_fs) << ", ratio=";
  if (report.t1_fs && report.t2_fs) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *report.t2_fs / *report.t1_fs);
    std::cout << buf;
  } else {
    std::cout << "--";
  }
  std::cout << "\n";
  return 0;
}

int cmd_ratio_map(const RunConfig& cfg) {
  const auto deltas = linspace(cfg.delta_min_ev, cfg.delta_max_ev, cfg.delta_steps);
  const auto deps = linspace(cfg.deps_min_ev, cfg.deps_max_ev, cfg.deps_steps);
  const auto result = analysis::ratio_map(deltas, deps, cfg.params);
  auto out = open_output(cfg.out);
  io::write_sweep_csv(out, result);
  std::cout << "wrote " << result.cell_count() << " cells to " << cfg.out << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep_param.empty() || cfg.sweep_values.empty()) {
    throw std::invalid_argument("sweep needs --sweep-param and --sweep-values");
  }
  analysis::SweepSpec spec;
  spec.base = cfg.params;
  spec.selector = parse_selector(cfg.selector);
  spec.t_max_ps = cfg.t_max_fs * 1e-3;
  spec.dt_ps = cfg.dt_fs * 1e-3;
  spec.horizon_ps = cfg.t_max_fs * 1e-3;
  spec.axes.push_back({cfg.sweep_param, cfg.sweep_values});
  if (!cfg.sweep_param2.empty()) {
    if (cfg.sweep_values2.empty()) {
      throw std::invalid_argument("--sweep-param2 requires --sweep-values2");
    }
    spec.axes.push_back({cfg.sweep_param2, cfg.sweep_values2});
  }
  const auto result = analysis::sweep(spec);
  auto out = open_output(cfg.out);
  io::write_sweep_csv(out, result);
  std::cout << "wrote " << result.cell_count() << " cells to " << cfg.out << "\n";
  return 0;
}

int cmd_heat(const RunConfig& cfg) {
  const double horizon_ps = cfg.t_max_fs * 1e-3;
  const auto report = thermo::energy_consumption(cfg.params, horizon_ps, cfg.dt_fs * 1e-3);
  std::cout << "q_total_ev=" << io::format_double(report.q_total_ev)
            << " q_p_ev=" << io::format_double(report.q_p_ev)
            << " q_coh_ev=" << io::format_double(report.q_coh_ev)
            << " horizon_ps=" << io::format_double(report.horizon_ps)
            << " quadrature_error_ev=" << io::format_double(report.quadrature_error_ev)
            << "\n";
  if (cfg.endpoints) {
    model::PhysicalParams p0 = cfg.params;
    p0.adiabatic = 0.0;
    model::PhysicalParams p1 = cfg.params;
    p1.adiabatic = 1.0;
    const double q0 = thermo::energy_consumption(p0, horizon_ps, cfg.dt_fs * 1e-3).q_total_ev;
    const double q1 = thermo::energy_consumption(p1, horizon_ps, cfg.dt_fs * 1e-3).q_total_ev;
    std::cout << "q_eps0_ev=" << io::format_double(q0)
              << " q_eps1_ev=" << io::format_double(q1) << " suppressed="
              << (q1 < q0 ? "yes" : "no") << "\n";
  }
  return 0;
}

int cmd_oracle_check(const RunConfig& cfg) {
  const auto grid = gaussian::uniform_grid(cfg.t_max_fs * 1e-3, cfg.dt_fs * 1e-3);
  const auto gauss = gaussian::propagate_moments(cfg.params, grid);
  const auto oracle = fock::integrate_oracle(cfg.params, cfg.cutoff, grid, cfg.secular);

  const double atol = 0.1 * cfg.rtol;
  struct Channel {
    const char* name;
    double max_ratio = 0.0; // |oracle-gaussian| / max(rtol*|gaussian|, atol); <= 1 passes
    double max_abs = 0.0;
  } channels[4] = {{"n1"}, {"n2"}, {"re_c"}, {"im_c"}};

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& go = gauss.samples[i];
    const auto& fo = oracle.trajectory.samples[i];
    const double gv[4] = {go.n1, go.n2, go.coherence.real(), go.coherence.imag()};
    const double fv[4] = {fo.n1, fo.n2, fo.coherence.real(), fo.coherence.imag()};
    for (int k = 0; k < 4; ++k) {
      const double diff = std::abs(fv[k] - gv[k]);
      const double allowed = std::max(cfg.rtol * std::abs(gv[k]), atol);
      channels[k].max_ratio = std::max(channels[k].max_ratio, diff / allowed);
      channels[k].max_abs = std::max(channels[k].max_abs, diff);
    }
  }

  bool pass = true;
  for (const auto& ch : channels) {
    std::cout << ch.name << ": max deviation " << io::format_double(ch.max_abs)
              << " (" << io::format_double(ch.max_ratio) << " of allowance)\n";
    pass = pass && ch.max_ratio <= 1.0;
  }
  std::cout << "trace drift " << io::format_double(oracle.diagnostics.max_trace_drift)
            << ", min eigenvalue " << io::format_double(oracle.diagnostics.min_eigenvalue)
            << "\n";
  std::cout << (pass ? "oracle check passed" : "oracle check FAILED") << "\n";
  return pass ? 0 : 1;
}

}

int main(int argc, char** argv) {
  CLI::App app{"coupled vibrational-mode dynamics between two thermal baths"};
  app.require_subcommand(1);

  CliOverrides o;
  std::string command;
  for (const char* name :
       {"simulate", "timescales", "ratio-map", "sweep", "heat", "oracle-check"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->callback([&command, name] { command = name; });
    sub->add_option("--config", o.config_path);
    sub->add_option("--scenario", o.scenario);
    sub->add_option("--eps1-ev", o.eps1);
    sub->add_option("--eps2-ev", o.eps2);
    sub->add_option("--delta-ev", o.delta);
    sub->add_option("--gamma-psinv", o.gamma);
    sub->add_option("--temp1-k", o.temp1);
    sub->add_option("--temp2-k", o.temp2);
    sub->add_option("--adiabatic", o.adiabatic);
    sub->add_flag("--secular", o.secular);
    sub->add_option("--t-max-fs", o.t_max);
    sub->add_option("--dt-fs", o.dt);
    sub->add_option("--cutoff", o.cutoff);
    sub->add_option("--rtol", o.rtol);
    sub->add_option("--out", o.out);
    sub->add_option("--sweep-param", o.sweep_param);
    sub->add_option("--sweep-values", o.sweep_values);
    sub->add_option("--sweep-param2", o.sweep_param2);
    sub->add_option("--sweep-values2", o.sweep_values2);
    sub->add_option("--selector", o.selector);
    sub->add_option("--delta-min-ev", o.delta_min);
    sub->add_option("--delta-max-ev", o.delta_max);
    sub->add_option("--delta-steps", o.delta_steps);
    sub->add_option("--deps-min-ev", o.deps_min);
    sub->add_option("--deps-max-ev", o.deps_max);
    sub->add_option("--deps-steps", o.deps_steps);
    sub->add_flag("--endpoints", o.endpoints);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = resolve_config(o, command + ".csv");
    if (command == "simulate") {
      return cmd_simulate(cfg);
    }
    if (command == "timescales") {
      return cmd_timescales(cfg);
    }
    if (command == "ratio-map") {
      return cmd_ratio_map(cfg);
    }
    if (command == "sweep") {
      return cmd_sweep(cfg);
    }
    if (command == "heat") {
      return cmd_heat(cfg);
    }
    if (command == "oracle-check") {
      return cmd_oracle_check(cfg);
    }
    std::cerr << "error: no command\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
