#include "vibroq/units.hpp"

#include <cmath>
#include <stdexcept>

namespace vibroq::units {

double bose_occupation(double energy_ev, double temperature_k) {
  if (!(energy_ev > 0.0)) {
    throw std::domain_error("bose_occupation: energy must be positive");
  }
  if (temperature_k < 0.0) {
    throw std::invalid_argument("bose_occupation: negative temperature");
  }
  if (temperature_k == 0.0) {
    return 0.0;
  }
  return 1.0 / std::expm1(energy_ev / (kb_ev_per_k * temperature_k));
}

namespace {

// value expressed in eV
double to_ev(double value, Unit from) {
  switch (from) {
    case Unit::Ev:
      return value;
    case Unit::WavenumberCm1:
      return value / cm1_per_ev;
    case Unit::AngularPsInv:
      return value * hbar_ev_ps;
    case Unit::Kelvin:
      return value * kb_ev_per_k;
  }
  throw std::invalid_argument("convert: unknown unit");
}

double from_ev(double value_ev, Unit to) {
  switch (to) {
    case Unit::Ev:
      return value_ev;
    case Unit::WavenumberCm1:
      return value_ev * cm1_per_ev;
    case Unit::AngularPsInv:
      return value_ev / hbar_ev_ps;
    case Unit::Kelvin:
      return value_ev / kb_ev_per_k;
  }
  throw std::invalid_argument("convert: unknown unit");
}

}

double convert(double value, Unit from, Unit to) {
  if (from == to) {
    return value;
  }
  return from_ev(to_ev(value, from), to);
}

}
