#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "vibroq/model.hpp"

namespace vibroq::testing {

inline bool close_rel(double a, double b, double rtol, double atol = 0.0) {
  return std::abs(a - b) <= std::max(rtol * std::max(std::abs(a), std::abs(b)), atol);
}

inline model::PhysicalParams random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  model::PhysicalParams p;
  p.eps1_ev = 0.05 + 0.6 * u01(rng);
  p.eps2_ev = 0.05 + 0.6 * u01(rng);
  p.delta_ev = 0.3 * u01(rng);
  p.gamma_psinv = 0.1 + 20.0 * u01(rng);
  p.temp1_k = 8000.0 * u01(rng);
  p.temp2_k = 8000.0 * u01(rng);
  p.adiabatic = u01(rng);
  return p;
}

inline model::Matrix2c random_complex_symmetric(std::mt19937& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  model::Matrix2c m;
  const std::complex<double> b{u(rng), u(rng)};
  m << std::complex<double>{u(rng), u(rng)}, b, b, std::complex<double>{u(rng), u(rng)};
  return m;
}

}
