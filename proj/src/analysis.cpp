#include "vibroq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vibroq/errors.hpp"
#include "vibroq/thermo.hpp"
#include "vibroq/units.hpp"

namespace vibroq::analysis {

namespace {

struct DeviationSignal {
  std::vector<double> t;
  std::vector<double> v; // |deviation from steady|
};

// e^-1 crossing of the upper envelope: linear interpolation through the
// interior local maxima, with the global-maximum sample prepended when it
// precedes the first one. Fewer than two anchors means there is no
// oscillatory relaxation to time. Returns the crossing time or nullopt;
// threshold_out reports the level used.
std::optional<double> envelope_crossing(const DeviationSignal& s, CrossingMethod method,
                                        double* threshold_out) {
  *threshold_out = 0.0;
  const std::size_t count = s.v.size();
  if (count < 3) {
    return std::nullopt;
  }

  std::size_t gi = 0;
  for (std::size_t i = 1; i < count; ++i) {
    if (s.v[i] > s.v[gi]) {
      gi = i;
    }
  }
  const double gmax = s.v[gi];
  if (gmax < 1e-9) {
    return std::nullopt; // no dynamics
  }
  const double threshold = gmax / std::exp(1.0);
  *threshold_out = threshold;

  std::vector<std::size_t> anchors;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    if (s.v[i] >= s.v[i - 1] && s.v[i] > s.v[i + 1]) {
      anchors.push_back(i);
    }
  }
  if (anchors.empty()) {
    return std::nullopt; // non-oscillatory signal: no relaxation to time
  }
  if (gi < anchors.front()) {
    anchors.insert(anchors.begin(), gi);
  }
  // past the last peak the signal is its own upper envelope
  for (std::size_t i = anchors.back() + 1; i < count; ++i) {
    anchors.push_back(i);
  }
  if (anchors.size() < 2) {
    return std::nullopt;
  }

  if (s.v[anchors.back()] >= threshold) {
    throw HorizonTooShortError(
        "extract_timescales: envelope has not decayed below e^-1 of its maximum");
  }

  std::optional<double> crossing;
  for (std::size_t k = 0; k + 1 < anchors.size(); ++k) {
    const double va = s.v[anchors[k]];
    const double vb = s.v[anchors[k + 1]];
    if (va >= threshold && vb < threshold) {
      const double ta = s.t[anchors[k]];
      const double tb = s.t[anchors[k + 1]];
      const double tc = ta + (va - threshold) / (va - vb) * (tb - ta);
      crossing = tc;
      if (method == CrossingMethod::FirstCrossing) {
        break;
      }
    }
  }
  return crossing;
}

void check_final_quarter(const gaussian::Trajectory& traj) {
  const std::size_t count = traj.samples.size();
  const std::size_t begin = count - count / 4;
  const auto check = [&](auto&& get, const char* name) {
    double scale = 0.0;
    for (const auto& s : traj.samples) {
      scale = std::max(scale, std::abs(get(s)));
    }
    if (scale < 1e-12) {
      return; // flat signal
    }
    double lo = get(traj.samples[begin]);
    double hi = lo;
    for (std::size_t i = begin; i < count; ++i) {
      lo = std::min(lo, get(traj.samples[i]));
      hi = std::max(hi, get(traj.samples[i]));
    }
    if (hi - lo >= 0.01 * scale) {
      throw HorizonTooShortError(std::string("extract_timescales: ") + name +
                                 " still varies by >= 1% over the final quarter");
    }
  };
  check([](const gaussian::Sample& s) { return s.n1; }, "n1");
  check([](const gaussian::Sample& s) { return s.n2; }, "n2");
  check([](const gaussian::Sample& s) { return s.coherence.real(); }, "Re C");
  check([](const gaussian::Sample& s) { return s.coherence.imag(); }, "Im C");
}

}

TimescaleReport extract_timescales(const gaussian::Trajectory& traj, CrossingMethod method) {
  if (traj.samples.size() != traj.t_ps.size()) {
    throw std::invalid_argument("extract_timescales: malformed trajectory");
  }
  if (traj.samples.size() < 8) {
    throw std::invalid_argument("extract_timescales: trajectory is empty or too short");
  }
  check_final_quarter(traj);

  TimescaleReport report;
  report.method = method;

  const gaussian::Sample& last = traj.samples.back();
  report.m_z_steady = last.m_z;
  report.coherence_steady = last.coherence;

  if (last.m_z.has_value()) {
    DeviationSignal pop;
    pop.t.reserve(traj.samples.size());
    pop.v.reserve(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
      if (traj.samples[i].m_z.has_value()) {
        pop.t.push_back(traj.t_ps[i]);
        pop.v.push_back(std::abs(*traj.samples[i].m_z - *last.m_z));
      }
    }
    if (auto t = envelope_crossing(pop, method, &report.threshold_pop)) {
      report.t1_fs = *t * 1e3;
    }
  }

  DeviationSignal coh;
  coh.t = traj.t_ps;
  coh.v.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    coh.v.push_back(std::abs(s.coherence - last.coherence));
  }
  if (auto t = envelope_crossing(coh, method, &report.threshold_coh)) {
    report.t2_fs = *t * 1e3;
  }
  return report;
}

ExpansionSlopes f_expansion_coeffs(const PhysicalParams& p) {
  p.validate();
  const double g = p.gamma_psinv;
  const double d = p.u() / g;
  const double w = (p.omega1() - p.omega2()) / g;

  const double f0 = model::f_formula(d, w, 0.0);
  const double f1 = model::f_formula(d, w, 1.0);
  if (f0 == 0.0 || f1 == 0.0) {
    throw std::domain_error("f_expansion_coeffs: F vanishes at an endpoint");
  }
  const double s0 = 1.0 - 4.0 * d * d - w * w;
  const double s1 = 5.0 - 4.0 * d * d - w * w;
  ExpansionSlopes slopes;
  slopes.slope_at_0 =
      (1.0 + (1.0 - (2.0 * d + w) * (2.0 * d + w)) / std::hypot(s0, 2.0 * w)) / f0;
  slopes.slope_at_1 =
      (1.0 + (5.0 + (6.0 * d + w) * (2.0 * d - w)) / std::hypot(s1, 2.0 * (4.0 * d - w))) /
      f1;
  return slopes;
}

SweepResult ratio_map(const std::vector<double>& delta_grid_ev,
                      const std::vector<double>& deps_grid_ev,
                      const PhysicalParams& base) {
  if (delta_grid_ev.empty() || deps_grid_ev.empty()) {
    throw std::invalid_argument("ratio_map: grids must be non-empty");
  }
  base.validate();
  const double hg = units::hbar_ev_ps * base.gamma_psinv;

  SweepResult result;
  result.axes = {{"delta_ev", delta_grid_ev}, {"deps_ev", deps_grid_ev}};
  result.values.resize(delta_grid_ev.size() * deps_grid_ev.size());
  result.notes.resize(result.values.size());
  for (std::size_t i = 0; i < delta_grid_ev.size(); ++i) {
    for (std::size_t j = 0; j < deps_grid_ev.size(); ++j) {
      const double d = delta_grid_ev[i] / hg;
      const double w = deps_grid_ev[j] / hg;
      const double f0 = model::f_formula(d, w, 0.0);
      const double f1 = model::f_formula(d, w, 1.0);
      const std::size_t cell = i * deps_grid_ev.size() + j;
      if (std::abs(3.0 - f1) < 1e-12) {
        result.notes[cell] = "3 - F at full coupling vanishes";
      } else {
        result.values[cell] = (3.0 - f0) / (3.0 - f1);
      }
    }
  }
  return result;
}

namespace {

void apply_param(PhysicalParams& p, const std::string& name, double value) {
  if (name == "temp1_k") {
    p.temp1_k = value;
  } else if (name == "temp2_k") {
    p.temp2_k = value;
  } else if (name == "delta_ev") {
    p.delta_ev = value;
  } else if (name == "deps_ev") {
    p.eps2_ev = p.eps1_ev - value;
  } else if (name == "eps1_ev") {
    p.eps1_ev = value;
  } else if (name == "eps2_ev") {
    p.eps2_ev = value;
  } else if (name == "gamma_psinv") {
    p.gamma_psinv = value;
  } else if (name == "adiabatic") {
    p.adiabatic = value;
  } else {
    throw std::invalid_argument("sweep: unknown parameter axis '" + name + "'");
  }
}

std::optional<double> eval_cell(const SweepSpec& spec, const PhysicalParams& p,
                                std::string& note) {
  switch (spec.selector) {
    case Selector::F:
    case Selector::ThreeMinusF: {
      const double g = p.gamma_psinv;
      const double f =
          model::f_formula(p.u() / g, (p.omega1() - p.omega2()) / g, p.adiabatic);
      return spec.selector == Selector::F ? f : 3.0 - f;
    }
    case Selector::T1:
    case Selector::T2:
    case Selector::T2OverT1: {
      const auto grid = gaussian::uniform_grid(spec.t_max_ps, spec.dt_ps);
      const auto traj = gaussian::propagate_moments(p, grid, ExecMode::Serial);
      const auto ts = extract_timescales(traj, spec.method);
      if (spec.selector == Selector::T1) {
        return ts.t1_fs;
      }
      if (spec.selector == Selector::T2) {
        return ts.t2_fs;
      }
      if (ts.t1_fs && ts.t2_fs) {
        return *ts.t2_fs / *ts.t1_fs;
      }
      note = "t1 or t2 absent";
      return std::nullopt;
    }
    case Selector::Q:
      return thermo::energy_consumption(p, spec.horizon_ps, spec.dt_ps).q_total_ev;
    case Selector::CoherenceTrace: {
      const auto grid = gaussian::uniform_grid(spec.horizon_ps, spec.dt_ps);
      const auto traj = gaussian::propagate_moments(p, grid, ExecMode::Serial);
      const Complex c_inf = gaussian::steady_moments(p).n(0, 1);
      double acc = 0.5 * ((traj.samples.front().coherence - c_inf).real() +
                          (traj.samples.back().coherence - c_inf).real());
      for (std::size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        acc += (traj.samples[i].coherence - c_inf).real();
      }
      return acc * spec.dt_ps;
    }
  }
  throw std::invalid_argument("sweep: unknown selector");
}

}

SweepResult sweep(const SweepSpec& spec, ExecMode mode) {
  if (spec.axes.empty()) {
    throw std::invalid_argument("sweep: need at least one axis");
  }
  spec.base.validate();
  std::size_t cells = 1;
  for (const auto& axis : spec.axes) {
    if (axis.values.empty()) {
      throw std::invalid_argument("sweep: axis '" + axis.param + "' is empty");
    }
    PhysicalParams probe = spec.base; // reject unknown axis names up front
    apply_param(probe, axis.param, axis.values[0]);
    cells *= axis.values.size();
  }

  SweepResult result;
  result.axes = spec.axes;
  result.values.resize(cells);
  result.notes.resize(cells);

  const auto run_cell = [&](std::size_t cell) {
    PhysicalParams p = spec.base;
    std::size_t rest = cell;
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      const auto& axis = spec.axes[a];
      apply_param(p, axis.param, axis.values[rest % axis.values.size()]);
      rest /= axis.values.size();
    }
    std::string note;
    try {
      try {
        result.values[cell] = eval_cell(spec, p, note);
      } catch (const DegenerateDriftError&) {
        // measure-zero eigenvalue collision: nudge the coupling and note it
        p.delta_ev = (p.delta_ev == 0.0) ? 1e-9 : p.delta_ev * (1.0 + 1e-9);
        note = "degenerate drift: delta perturbed by 1e-9 relative";
        result.values[cell] = eval_cell(spec, p, note);
      }
    } catch (const std::exception& ex) {
      result.values[cell] = std::nullopt;
      note = ex.what();
    }
    result.notes[cell] = note;
  };

  const auto count = static_cast<std::ptrdiff_t>(cells);
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      run_cell(static_cast<std::size_t>(i));
    }
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      run_cell(static_cast<std::size_t>(i));
    }
  }
  return result;
}

}
