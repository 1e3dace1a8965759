#pragma once

#include <stdexcept>
#include <string>

namespace vibroq {

/// Drift matrix eigenvalues collided within tolerance; the closed-form
/// propagation through the eigenbasis is not available at this point.
struct DegenerateDriftError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trajectory or quadrature horizon is too short for the requested analysis.
struct HorizonTooShortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fock-space truncation cannot contain the thermal occupation.
struct CutoffTooSmallError : std::runtime_error {
  CutoffTooSmallError(const std::string& msg, int required)
      : std::runtime_error(msg), required_cutoff(required) {}
  int required_cutoff;
};

/// Moment matrix is singular (or nearly so); no normalizable Gaussian
/// quasi-probability exists for it.
struct SingularCovarianceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}
