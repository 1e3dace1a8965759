#include "vibroq/scenarios.hpp"

#include <stdexcept>

#include "vibroq/units.hpp"

namespace vibroq::scenarios {

namespace {

// Shared table defaults: delta-eps = 0.15 eV below the 3500 cm^-1 mode at
// gamma = 10/ps between a 5600 K source and a 2100 K drain.
model::PhysicalParams table_base() {
  model::PhysicalParams p;
  p.eps1_ev = 0.434;
  p.eps2_ev = 0.284;
  p.delta_ev = 0.1;
  p.gamma_psinv = 10.0;
  p.temp1_k = 5600.0;
  p.temp2_k = 2100.0;
  p.adiabatic = 1.0;
  return p;
}

}

Scenario get(const std::string& name) {
  Scenario s;
  s.params = table_base();
  s.t_max_fs = 500.0;
  s.dt_fs = 0.1;
  if (name == "custom" || name == "table1") {
    return s;
  }
  if (name == "table2") {
    s.params.delta_ev = 0.08;
    return s;
  }
  if (name == "ohstretch") {
    using units::Unit;
    s.params.eps1_ev = units::convert(3500.0, Unit::WavenumberCm1, Unit::Ev);
    s.params.eps2_ev = units::convert(3320.0, Unit::WavenumberCm1, Unit::Ev);
    s.params.delta_ev = 0.0112;
    s.params.gamma_psinv = 0.3;
    s.t_max_fs = 20000.0;
    s.dt_fs = 0.5;
    return s;
  }
  if (name == "fig3") {
    s.t_max_fs = 2000.0; // long enough for the energy-consumption quadrature
    return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

std::vector<std::string> names() {
  return {"custom", "table1", "table2", "ohstretch", "fig3"};
}

}
