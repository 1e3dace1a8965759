#include "vibroq/gaussian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vibroq/errors.hpp"
#include "vibroq/thermo.hpp"

namespace vibroq::gaussian {

Observables observables(const MomentState& s) {
  Observables o;
  o.n1 = s.n(0, 0).real();
  o.n2 = s.n(1, 1).real();
  o.coherence = s.n(0, 1);
  const double total = o.n1 + o.n2;
  if (total >= 1e-12) {
    o.m_z = (o.n1 - o.n2) / total;
  }
  return o;
}

std::vector<double> uniform_grid(double t_max_ps, double dt_ps) {
  if (!(dt_ps > 0.0) || !(t_max_ps >= 0.0)) {
    throw std::invalid_argument("uniform_grid: need dt > 0 and t_max >= 0");
  }
  const auto n = static_cast<std::size_t>(std::llround(t_max_ps / dt_ps));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i] = static_cast<double>(i) * dt_ps;
  }
  return t;
}

MomentPropagator::MomentPropagator(const PhysicalParams& p)
    : MomentPropagator(model::build_matrices(p).gamma, model::build_matrices(p).m,
                       p.gamma_psinv) {}

MomentPropagator::MomentPropagator(const Matrix2c& drift, const Matrix2c& diffusion,
                                   double gamma_rate)
    : es_(model::drift_eigensystem(drift)), two_gamma_(2.0 * gamma_rate) {
  mtil_ = es_.right.adjoint() * diffusion * es_.right;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      denom_(i, j) = std::conj(es_.lambda(i)) + es_.lambda(j);
    }
  }
}

Matrix2c MomentPropagator::at(double t_ps) const {
  const Complex e0 = std::exp(-es_.lambda(0) * t_ps);
  const Complex e1 = std::exp(-es_.lambda(1) * t_ps);
  const Complex decay[2] = {e0, e1};
  Matrix2c k;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      k(i, j) = mtil_(i, j) * (1.0 - std::conj(decay[i]) * decay[j]) / denom_(i, j);
    }
  }
  Matrix2c n = two_gamma_ * (es_.left.adjoint() * k * es_.left);
  n = 0.5 * (n + n.adjoint()).eval();
  return n;
}

Matrix2c MomentPropagator::steady() const {
  Matrix2c k;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      k(i, j) = mtil_(i, j) / denom_(i, j);
    }
  }
  Matrix2c n = two_gamma_ * (es_.left.adjoint() * k * es_.left);
  n = 0.5 * (n + n.adjoint()).eval();
  return n;
}

namespace {

Sample sample_from_state(const Matrix2c& n, const PhysicalParams& p) {
  Sample s;
  const Observables o = observables(MomentState{0.0, n});
  s.n1 = o.n1;
  s.n2 = o.n2;
  s.coherence = o.coherence;
  s.m_z = o.m_z;
  const auto [j1, j2] = thermo::heat_currents(n, p);
  s.j1_ev_ps = j1;
  s.j2_ev_ps = j2;
  return s;
}

}

Trajectory propagate_moments(const PhysicalParams& p, std::span<const double> grid_ps,
                             ExecMode mode) {
  p.validate();
  if (grid_ps.empty() || grid_ps.front() != 0.0) {
    throw std::invalid_argument("propagate_moments: grid must start at t = 0");
  }
  const MomentPropagator prop(p);

  Trajectory traj;
  traj.t_ps.assign(grid_ps.begin(), grid_ps.end());
  traj.samples.resize(grid_ps.size());

  const auto count = static_cast<std::ptrdiff_t>(grid_ps.size());
  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      traj.samples[i] = sample_from_state(prop.at(grid_ps[i]), p);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      traj.samples[i] = sample_from_state(prop.at(grid_ps[i]), p);
    }
  }
  return traj;
}

MomentState steady_moments(const PhysicalParams& p) {
  p.validate();
  const MomentPropagator prop(p);
  return MomentState{std::numeric_limits<double>::infinity(), prop.steady()};
}

GaussianPCoefficients p_coefficients(const MomentState& s) {
  const Matrix2c& n = s.n;
  const double n11 = n(0, 0).real();
  const double n22 = n(1, 1).real();
  const double det = n11 * n22 - std::norm(n(0, 1));
  // eigenvalues of the 2x2 Hermitian moment matrix
  const double mean = 0.5 * (n11 + n22);
  const double rad = std::sqrt(std::max(0.0, mean * mean - det));
  if (mean - rad <= 1e-12) {
    throw SingularCovarianceError("p_coefficients: moment matrix is singular");
  }
  GaussianPCoefficients g;
  g.a = n22 / det;
  g.b = n11 / det;
  g.c = -n(1, 0) / det;
  return g;
}

Matrix2c moments_from_p(const GaussianPCoefficients& g) {
  const double det_q = g.a * g.b - std::norm(g.c);
  if (det_q <= 0.0) {
    throw SingularCovarianceError("moments_from_p: coefficients are not normalizable");
  }
  Matrix2c n;
  n(0, 0) = g.b / det_q;
  n(1, 1) = g.a / det_q;
  n(0, 1) = -std::conj(g.c) / det_q;
  n(1, 0) = -g.c / det_q;
  return n;
}

}
