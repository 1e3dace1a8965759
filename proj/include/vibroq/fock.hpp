#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vibroq/exec.hpp"
#include "vibroq/gaussian.hpp"
#include "vibroq/model.hpp"

namespace vibroq::fock {

using model::Complex;
using model::PhysicalParams;

/// Truncated two-mode density matrix over the product basis |n1,n2>,
/// occupations in [0, cutoff], linear index n1*(cutoff+1) + n2.
struct FockDensityMatrix {
  int cutoff = 0;
  double t_ps = 0.0;
  Eigen::MatrixXcd rho;

  static FockDensityMatrix vacuum(int cutoff);
  int dim() const { return (cutoff + 1) * (cutoff + 1); }
};

/// Master-equation generator data: Hamiltonian frequencies plus the
/// coefficient matrices of the downward (decay) and upward (pump) channels.
/// The channel coefficients are fixed so that the induced moment equations
/// reproduce the phase-space drift and diffusion exactly:
/// decay - pump = 2*gamma*[[1,eps],[eps,2]], pump = 2*gamma*M.
struct Generator {
  int cutoff = 0;
  double w1 = 0.0; // rad/ps
  double w2 = 0.0;
  double u = 0.0;
  Eigen::Matrix2d decay = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d pump = Eigen::Matrix2d::Zero();
  bool include_hamiltonian = true;
};

/// Full generator; with `secular` the cross (j != p) dissipator channels are
/// dropped.
Generator make_generator(const PhysicalParams& p, int cutoff, bool secular);

/// Dissipator-only generator of a single bath (1 or 2); used for the
/// heat-current cross checks.
Generator make_bath_generator(const PhysicalParams& p, int cutoff, int bath, bool secular);

/// Definition-level right-hand side, element by element. Serial reference
/// path; the compiled form below is tested against it.
void lindblad_rhs_reference(const Generator& g, const Eigen::MatrixXcd& rho,
                            Eigen::MatrixXcd& drho);

struct OracleDiagnostics {
  double max_trace_drift = 0.0;     ///< max |Tr rho - 1| over the run
  double min_eigenvalue = 0.0;      ///< most negative eigenvalue on the check schedule
  double max_hermiticity_err = 0.0; ///< max |rho - rho^dag| entry on the check schedule
};

struct OracleResult {
  gaussian::Trajectory trajectory;
  OracleDiagnostics diagnostics;
};

/// Classical fixed-step 4th-order integration of the operator master
/// equation from vacuum, sampling observables at every grid point. The grid
/// must be uniform starting at 0; the integration step is the grid spacing.
/// Throws CutoffTooSmallError when final populations exceed cutoff/4.
OracleResult integrate_oracle(const PhysicalParams& p, int cutoff,
                              std::span<const double> grid_ps, bool secular,
                              ExecMode mode = ExecMode::Parallel);

/// The same generator compiled to a sparse row-major form acting on vec(rho)
/// split into real and imaginary parts. Serial and parallel application are
/// bit-identical.
class CompiledGenerator {
 public:
  explicit CompiledGenerator(const Generator& g);

  int dim() const { return dim_; }

  void apply(const double* re_in, const double* im_in, double* re_out,
             double* im_out, ExecMode mode) const;
  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho, ExecMode mode) const;

  std::size_t entry_count() const { return col_re_.size() + col_im_.size(); }

 private:
  int dim_ = 0;
  // per row: [row_ptr_re_[r], row_ptr_re_[r+1]) real-coefficient entries and
  // [row_ptr_im_[r], row_ptr_im_[r+1]) imaginary-coefficient entries
  std::vector<int> row_ptr_re_, row_ptr_im_;
  std::vector<int> col_re_, col_im_;
  std::vector<double> val_re_, val_im_;
};

/// n1, n2 and <a1^dag a2> of an arbitrary operator in the truncated basis
/// (used on states and on generator outputs).
gaussian::Observables fock_observables(const Eigen::MatrixXcd& op, int cutoff);

/// Second-moment matrix N_jk = Tr(op a_j^dag a_k) of an operator.
model::Matrix2c fock_moments(const Eigen::MatrixXcd& op, int cutoff);

double trace_real(const Eigen::MatrixXcd& op);

}
