#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vibroq/analysis.hpp"
#include "vibroq/gaussian.hpp"

namespace vibroq::io {

/// Shortest representation that round-trips a double (17 significant digits).
std::string format_double(double v);

/// Header "t_fs,n1,n2,re_c,im_c,m_z,j1_ev_per_ps,j2_ev_per_ps"; absent m_z is
/// an empty field. Identical input produces byte-identical output.
void write_trajectory_csv(std::ostream& os, const gaussian::Trajectory& traj);

/// Axis header rows ("axis,<name>,<v0>,<v1>,...") followed by "values" and the
/// dense row-major value grid; absent cells are empty fields.
void write_sweep_csv(std::ostream& os, const analysis::SweepResult& result);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::optional<double>>> rows;
};

/// Reader used by the test suite; empty fields parse as absent.
Table read_csv(std::istream& is);

}
