#pragma once

#include <string>
#include <vector>

#include "vibroq/model.hpp"

namespace vibroq::scenarios {

/// Named parameter presets: custom/table1 (temperature study defaults),
/// table2 (coupling study), ohstretch (HDO in D2O), fig3 (coupling-dial and
/// energy-consumption study).
struct Scenario {
  model::PhysicalParams params;
  double t_max_fs = 500.0;
  double dt_fs = 0.1;
};

Scenario get(const std::string& name); ///< throws std::invalid_argument on unknown name
std::vector<std::string> names();

}
