#pragma once

#include <utility>

#include "vibroq/model.hpp"

namespace vibroq::thermo {

/// Transient energy consumption and its population/coherence split.
/// q_total = q_p + q_coh within max(1e-6*|q_total|, 1e-9 eV).
struct HeatReport {
  double q_total_ev = 0.0;
  double q_p_ev = 0.0;
  double q_coh_ev = 0.0; ///< -4*delta*gamma * integral of Re(C - C_inf) dt
  double horizon_ps = 0.0;
  double quadrature_error_ev = 0.0; ///< Richardson estimate from grid halving
};

/// Per-bath energy currents (eV/ps) for a given moment matrix, weighted by
/// the full system-energy coefficients (mode energies plus coupling).
/// first = injected by bath 1, second = absorbed by bath 2; their difference
/// equals d<H_s>/dt exactly, so the two balance at the steady state.
std::pair<double, double> heat_currents(const model::Matrix2c& n,
                                        const model::PhysicalParams& p);

/// Steady-subtracted transport integral Q over [0, horizon] by composite
/// trapezoid on the closed-form trajectory. The consumption counts each
/// bath's flow at the local mode energies (quanta times their own epsilon);
/// the coupling energy is attributed to the transport process and surfaces
/// as the coherence term of the split. Requires
/// horizon >= 20 / (gamma*(3-F)/2); throws HorizonTooShortError otherwise.
HeatReport energy_consumption(const model::PhysicalParams& p, double horizon_ps,
                              double dt_ps = 1e-4);

}
