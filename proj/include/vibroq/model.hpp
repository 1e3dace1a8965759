#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace vibroq::model {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

/// Two coupled vibrational modes attached to two thermal baths. Bath 1 drives
/// both modes through the collective coordinate a1 + a2; bath 2 drains mode 2.
struct PhysicalParams {
  double eps1_ev = 0.434;    ///< mode-1 excitation energy
  double eps2_ev = 0.284;    ///< mode-2 excitation energy
  double delta_ev = 0.1;     ///< vibron-vibron coupling
  double gamma_psinv = 10.0; ///< dissipation rate
  double temp1_k = 5600.0;   ///< hot-bath temperature
  double temp2_k = 2100.0;   ///< cold-bath temperature
  double adiabatic = 1.0;    ///< coherence-population coupling dial in [0,1]

  double omega1() const; ///< eps1/hbar, rad/ps
  double omega2() const; ///< eps2/hbar, rad/ps
  double u() const;      ///< delta/hbar, rad/ps

  /// Throws std::invalid_argument when any field is out of range.
  void validate() const;
};

/// Thermal occupations entering the diffusion matrix. y1221 is the bath-1
/// cross channel; bath 2 only feeds y22.
struct Occupations {
  double y11;
  double y22;
  double y1221;
};

Occupations diffusion_occupations(const PhysicalParams& p);

/// Drift and diffusion matrices of the phase-space equation of motion plus
/// their 4x4 embeddings over (alpha, alpha*).
struct ModelMatrices {
  Matrix2c gamma; ///< drift; complex symmetric
  Matrix2c m;     ///< diffusion occupations; Hermitian
  Matrix4c sigma; ///< diag(gamma, gamma^dagger)
  Matrix4c d;     ///< gamma_rate * [[0, m], [m, 0]]
};

ModelMatrices build_matrices(const PhysicalParams& p);

/// Dissipative (real) drift contribution of one bath:
/// bath 1 -> gamma*[[1, eps],[eps, 1]], bath 2 -> gamma*diag(0, 1).
Eigen::Matrix2d bath_drift(const PhysicalParams& p, int bath);

/// Bath-resolved split of the diffusion occupation matrix; the two parts sum
/// to ModelMatrices::m.
Eigen::Matrix2d bath_diffusion(const PhysicalParams& p, int bath);

/// Eigen pair of a 2x2 drift matrix with biorthonormal left/right vectors:
/// left * right = I and gamma = right * diag(lambda) * left.
struct EigenSystem2 {
  Eigen::Vector2cd lambda;
  Matrix2c right; ///< columns are right eigenvectors
  Matrix2c left;  ///< rows are left eigenvectors; transpose of `right` for
                  ///< complex-symmetric input
};

/// Throws DegenerateDriftError when |l+ - l-| < 1e-12 * |l+|.
EigenSystem2 drift_eigensystem(const Matrix2c& gamma);

/// Slow/fast rate-splitting parameter from the closed-form expression,
/// principal (non-negative) branch. Note the linear-in-eps term under the
/// radical; the eigenvalue route carries eps^2 instead, and the two agree at
/// eps in {0, 1}.
double f_formula(double d, double w, double eps);

/// G = (4 eps d - w)/F; absent when F vanishes.
std::optional<double> g_formula(double d, double w, double eps);

/// Dimensionless couplings and the rate-splitting parameter evaluated both
/// ways. f_eigen = |Re l+ - Re l-|/gamma from the drift eigensystem.
struct ReducedParams {
  double d;
  double w;
  double f_analytic;
  std::optional<double> g_analytic;
  double f_eigen;
};

ReducedParams reduced_params(const PhysicalParams& p);

/// Drift matrix of the operator Langevin equation obtained by eliminating the
/// bath modes; its coherence coupling is pinned at 1, so it equals the
/// phase-space drift at adiabatic = 1.
Matrix2c langevin_drift(const PhysicalParams& p);

}
