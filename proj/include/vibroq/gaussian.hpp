#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "vibroq/exec.hpp"
#include "vibroq/model.hpp"

namespace vibroq::gaussian {

using model::Complex;
using model::Matrix2c;
using model::PhysicalParams;

/// Normal-ordered second moments N_jk = <a_j^dag a_k> of the Gaussian state.
/// First moments vanish identically for the vacuum start and are not stored.
struct MomentState {
  double t_ps = 0.0;
  Matrix2c n = Matrix2c::Zero();
};

struct Observables {
  double n1 = 0.0;
  double n2 = 0.0;
  Complex coherence{0.0, 0.0};     ///< <a1^dag a2>
  std::optional<double> m_z; ///< (n1-n2)/(n1+n2); absent when n1+n2 < 1e-12
};

Observables observables(const MomentState& s);

struct Sample {
  double n1 = 0.0;
  double n2 = 0.0;
  Complex coherence{0.0, 0.0};
  std::optional<double> m_z;
  double j1_ev_ps = 0.0; ///< energy current injected by bath 1
  double j2_ev_ps = 0.0; ///< energy current absorbed by bath 2
};

struct Trajectory {
  std::vector<double> t_ps;
  std::vector<Sample> samples;
};

/// Uniform grid 0, dt, 2dt, ... covering [0, t_max].
std::vector<double> uniform_grid(double t_max_ps, double dt_ps);

/// Closed-form moment propagation from vacuum through the drift eigenbasis.
/// Entries of N(t) are linear combinations of exp(-(conj(l_i)+l_j) t).
class MomentPropagator {
 public:
  explicit MomentPropagator(const PhysicalParams& p);
  /// Propagator for explicit drift/diffusion input (gamma_rate in 1/ps).
  MomentPropagator(const Matrix2c& drift, const Matrix2c& diffusion, double gamma_rate);

  Matrix2c at(double t_ps) const;
  Matrix2c steady() const;

 private:
  model::EigenSystem2 es_;
  Matrix2c mtil_;     // V^dag M V
  Matrix2c denom_;    // conj(l_i) + l_j
  double two_gamma_;
};

/// Vacuum-start trajectory over the grid (grid must start at 0), with
/// per-sample observables and heat currents attached. Samples are evaluated
/// independently; serial and parallel results are bit-identical.
Trajectory propagate_moments(const PhysicalParams& p, std::span<const double> grid_ps,
                             ExecMode mode = ExecMode::Parallel);

/// Unique solution of the steady-state condition
/// gamma^dag N + N gamma = 2 gamma_rate M.
MomentState steady_moments(const PhysicalParams& p);

/// Inverse-covariance coefficients of the Gaussian quasi-probability
/// exp(-[a|a1|^2 + b|a2|^2 + c a1* a2 + c* a1 a2*]).
struct GaussianPCoefficients {
  double a;
  double b;
  Complex c;
};

/// Throws SingularCovarianceError when N has an eigenvalue <= 1e-12.
GaussianPCoefficients p_coefficients(const MomentState& s);

/// Moments reconstructed from the coefficients (round-trip inverse).
Matrix2c moments_from_p(const GaussianPCoefficients& g);

}
