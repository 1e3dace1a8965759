#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vibroq/exec.hpp"
#include "vibroq/gaussian.hpp"
#include "vibroq/model.hpp"

namespace vibroq::analysis {

using model::Complex;
using model::PhysicalParams;

/// Which e^-1 crossing of the deviation envelope defines a time scale.
/// LastCrossing is robust against early oscillation nodes and is the default.
enum class CrossingMethod { LastCrossing, FirstCrossing };

struct TimescaleReport {
  std::optional<double> t1_fs; ///< population-imbalance relaxation time
  std::optional<double> t2_fs; ///< coherence relaxation time
  std::optional<double> m_z_steady;
  Complex coherence_steady{0.0, 0.0};
  CrossingMethod method = CrossingMethod::LastCrossing;
  double threshold_pop = 0.0; ///< e^-1 * max-deviation level actually used
  double threshold_coh = 0.0;
};

/// e^-1 relaxation times of |M_z - M_z_inf| and |C - C_inf|. Steady values
/// are taken from the final sample; deviations are enveloped by linear
/// interpolation through their local maxima (plus the global-maximum sample
/// when it precedes the first one). A signal with fewer than two envelope
/// anchors, or with max deviation < 1e-9, yields an absent time.
/// Throws HorizonTooShortError when the final quarter still varies by >= 1%
/// or the envelope has not decayed below threshold; std::invalid_argument on
/// an empty/too-short trajectory.
TimescaleReport extract_timescales(const gaussian::Trajectory& traj,
                                   CrossingMethod method = CrossingMethod::LastCrossing);

/// First-order response of F to the coherence-population coupling at the two
/// endpoints, in closed form.
struct ExpansionSlopes {
  double slope_at_0;
  double slope_at_1;
};

/// Throws std::domain_error when F vanishes at either endpoint.
ExpansionSlopes f_expansion_coeffs(const PhysicalParams& p);

struct SweepAxis {
  std::string param; ///< temp1_k, temp2_k, delta_ev, deps_ev, eps1_ev,
                     ///< eps2_ev, gamma_psinv, adiabatic
  std::vector<double> values;
};

/// Dense grid of outputs in row-major axis order; absent cells carry a note.
struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<std::optional<double>> values;
  std::vector<std::string> notes;

  std::size_t cell_count() const { return values.size(); }
};

/// (3 - F|eps=0) / (3 - F|eps=1) over a (delta, deps) grid; cells where the
/// denominator vanishes are absent.
SweepResult ratio_map(const std::vector<double>& delta_grid_ev,
                      const std::vector<double>& deps_grid_ev,
                      const PhysicalParams& base);

enum class Selector {
  T1,
  T2,
  T2OverT1,
  F,
  ThreeMinusF,
  Q,
  CoherenceTrace ///< integral of Re(C - C_inf) dt over the horizon
};

struct SweepSpec {
  std::vector<SweepAxis> axes;
  Selector selector = Selector::T2;
  PhysicalParams base;
  double t_max_ps = 0.5;
  double dt_ps = 1e-4;
  double horizon_ps = 2.0; ///< for Q and CoherenceTrace
  CrossingMethod method = CrossingMethod::LastCrossing;
};

/// Cells are evaluated independently (parallel over cells permitted) and
/// merged in row-major order; output is bit-identical to serial execution.
/// Per-cell failures become absent cells with a diagnostic note. Degenerate
/// drift points are retried with the coupling perturbed by 1e-9 relative and
/// annotated.
SweepResult sweep(const SweepSpec& spec, ExecMode mode = ExecMode::Parallel);

}
