#include "vibroq/thermo.hpp"

#include <cmath>
#include <vector>

#include "vibroq/errors.hpp"
#include "vibroq/gaussian.hpp"

namespace vibroq::thermo {

using model::Matrix2c;
using model::PhysicalParams;

namespace {

Eigen::Matrix2d hamiltonian_coefficients(const PhysicalParams& p) {
  Eigen::Matrix2d h;
  h << p.eps1_ev, p.delta_ev, p.delta_ev, p.eps2_ev;
  return h;
}

double bath_energy_flow(const Matrix2c& n, const PhysicalParams& p, int bath) {
  const Matrix2c g = model::bath_drift(p, bath).cast<model::Complex>();
  const Matrix2c m = model::bath_diffusion(p, bath).cast<model::Complex>();
  const Matrix2c flow = -g * n - n * g + 2.0 * p.gamma_psinv * m;
  const Matrix2c h = hamiltonian_coefficients(p).cast<model::Complex>();
  return (h * flow).trace().real();
}

double trapezoid(const std::vector<double>& f, double dt, std::size_t stride = 1) {
  double acc = 0.5 * (f.front() + f[f.size() - 1]);
  for (std::size_t i = stride; i + stride < f.size(); i += stride) {
    acc += f[i];
  }
  return acc * dt * static_cast<double>(stride);
}

}

std::pair<double, double> heat_currents(const Matrix2c& n, const PhysicalParams& p) {
  return {bath_energy_flow(n, p, 1), -bath_energy_flow(n, p, 2)};
}

HeatReport energy_consumption(const PhysicalParams& p, double horizon_ps, double dt_ps) {
  p.validate();
  const double g = p.gamma_psinv;
  const double f = model::f_formula(p.u() / g, (p.omega1() - p.omega2()) / g, p.adiabatic);
  const double slow_rate = 0.5 * g * (3.0 - f);
  if (!(slow_rate > 0.0) || horizon_ps < 20.0 / slow_rate) {
    throw HorizonTooShortError("energy_consumption: horizon must cover 20/(gamma*(3-F)/2)");
  }

  // even interval count so the grid can be halved for the error estimate
  auto grid = gaussian::uniform_grid(horizon_ps, dt_ps);
  if ((grid.size() - 1) % 2 != 0) {
    grid.push_back(grid.back() + dt_ps);
  }

  const gaussian::MomentPropagator prop(p);
  const Matrix2c n_inf = prop.steady();
  const Eigen::Matrix2d h_loc = Eigen::Matrix2d(
      Eigen::Vector2d(p.eps1_ev, p.eps2_ev).asDiagonal());
  const Matrix2c g1 = model::bath_drift(p, 1).cast<model::Complex>();
  const Matrix2c g2 = model::bath_drift(p, 2).cast<model::Complex>();
  const Matrix2c inj1 =
      2.0 * g * model::bath_diffusion(p, 1).cast<model::Complex>();
  const Matrix2c inj2 =
      2.0 * g * model::bath_diffusion(p, 2).cast<model::Complex>();
  // local-mode energy flow of one bath channel
  const auto local_flow = [&](const Matrix2c& n, const Matrix2c& drift,
                              const Matrix2c& inject) {
    const Matrix2c flow = -drift * n - n * drift + inject;
    return (h_loc.cast<model::Complex>() * flow).trace().real();
  };
  const double j1_inf = local_flow(n_inf, g1, inj1);
  const double j2_inf = -local_flow(n_inf, g2, inj2);
  const double n1_inf = n_inf(0, 0).real();
  const double n2_inf = n_inf(1, 1).real();
  const double rec_inf = n_inf(0, 1).real();

  const std::size_t count = grid.size();
  std::vector<double> current_int(count), pop_int(count), coh_int(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix2c n = prop.at(grid[i]);
    const double j1 = local_flow(n, g1, inj1);
    const double j2 = -local_flow(n, g2, inj2);
    current_int[i] = (j1 - j1_inf) - (j2 - j2_inf);
    const double dn1 = n(0, 0).real() - n1_inf;
    const double dn2 = n(1, 1).real() - n2_inf;
    const double drc = n(0, 1).real() - rec_inf;
    // everything in the subtracted flow except the printed coherence term
    pop_int[i] = -2.0 * g * (p.eps1_ev * dn1 + 2.0 * p.eps2_ev * dn2) -
                 (2.0 * p.adiabatic * (p.eps1_ev + p.eps2_ev) - 4.0 * p.delta_ev) * g * drc;
    coh_int[i] = drc;
  }

  HeatReport report;
  report.horizon_ps = grid.back();
  report.q_total_ev = trapezoid(current_int, dt_ps);
  report.q_p_ev = trapezoid(pop_int, dt_ps);
  report.q_coh_ev = -4.0 * p.delta_ev * g * trapezoid(coh_int, dt_ps);
  const double coarse = trapezoid(current_int, dt_ps, 2);
  report.quadrature_error_ev = std::abs(report.q_total_ev - coarse) / 3.0;
  return report;
}

}
