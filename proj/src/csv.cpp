#include "vibroq/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace vibroq::io {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const gaussian::Trajectory& traj) {
  os << "t_fs,n1,n2,re_c,im_c,m_z,j1_ev_per_ps,j2_ev_per_ps\n";
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const gaussian::Sample& s = traj.samples[i];
    os << format_double(traj.t_ps[i] * 1e3) << ',' << format_double(s.n1) << ','
       << format_double(s.n2) << ',' << format_double(s.coherence.real()) << ','
       << format_double(s.coherence.imag()) << ','
       << (s.m_z ? format_double(*s.m_z) : std::string()) << ','
       << format_double(s.j1_ev_ps) << ',' << format_double(s.j2_ev_ps) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const analysis::SweepResult& result) {
  for (const auto& axis : result.axes) {
    os << "axis," << axis.param;
    for (double v : axis.values) {
      os << ',' << format_double(v);
    }
    os << '\n';
  }
  os << "values\n";
  const std::size_t cols = result.axes.back().values.size();
  for (std::size_t i = 0; i < result.values.size(); i += cols) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j > 0) {
        os << ',';
      }
      if (result.values[i + j]) {
        os << format_double(*result.values[i + j]);
      }
    }
    os << '\n';
  }
}

Table read_csv(std::istream& is) {
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
      fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
      fields.emplace_back();
    }
    if (first) {
      table.header = fields;
      first = false;
      continue;
    }
    std::vector<std::optional<double>> row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      if (f.empty()) {
        row.emplace_back(std::nullopt);
      } else {
        std::size_t used = 0;
        const double v = std::stod(f, &used);
        if (used != f.size()) {
          throw std::invalid_argument("read_csv: malformed numeric field '" + f + "'");
        }
        row.emplace_back(v);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}
