#include "vibroq/model.hpp"

#include <cmath>
#include <stdexcept>

#include "vibroq/errors.hpp"
#include "vibroq/units.hpp"

namespace vibroq::model {

namespace {
constexpr Complex kI{0.0, 1.0};
}

double PhysicalParams::omega1() const { return eps1_ev / units::hbar_ev_ps; }
double PhysicalParams::omega2() const { return eps2_ev / units::hbar_ev_ps; }
double PhysicalParams::u() const { return delta_ev / units::hbar_ev_ps; }

void PhysicalParams::validate() const {
  if (!(eps1_ev > 0.0) || !(eps2_ev > 0.0)) {
    throw std::invalid_argument("PhysicalParams: mode energies must be positive");
  }
  if (!(gamma_psinv > 0.0)) {
    throw std::invalid_argument("PhysicalParams: gamma must be positive");
  }
  if (temp1_k < 0.0 || temp2_k < 0.0) {
    throw std::invalid_argument("PhysicalParams: temperatures must be non-negative");
  }
  if (!(adiabatic >= 0.0 && adiabatic <= 1.0)) {
    throw std::invalid_argument("PhysicalParams: adiabatic must lie in [0, 1]");
  }
  if (!std::isfinite(delta_ev)) {
    throw std::invalid_argument("PhysicalParams: non-finite coupling");
  }
}

Occupations diffusion_occupations(const PhysicalParams& p) {
  p.validate();
  const double n1_hot = units::bose_occupation(p.eps1_ev, p.temp1_k);
  const double n2_hot = units::bose_occupation(p.eps2_ev, p.temp1_k);
  const double n2_cold = units::bose_occupation(p.eps2_ev, p.temp2_k);
  return Occupations{n1_hot, n2_hot + n2_cold, n1_hot + n2_hot};
}

ModelMatrices build_matrices(const PhysicalParams& p) {
  p.validate();
  const double g = p.gamma_psinv;
  const double eps = p.adiabatic;
  const Occupations y = diffusion_occupations(p);

  ModelMatrices mm;
  mm.gamma << kI * p.omega1() + g, kI * p.u() + eps * g,
              kI * p.u() + eps * g, kI * p.omega2() + 2.0 * g;
  mm.m << y.y11, 0.5 * eps * y.y1221,
          0.5 * eps * y.y1221, y.y22;

  mm.sigma = Matrix4c::Zero();
  mm.sigma.block<2, 2>(0, 0) = mm.gamma;
  mm.sigma.block<2, 2>(2, 2) = mm.gamma.adjoint();

  mm.d = Matrix4c::Zero();
  mm.d.block<2, 2>(0, 2) = g * mm.m;
  mm.d.block<2, 2>(2, 0) = g * mm.m;
  return mm;
}

Eigen::Matrix2d bath_drift(const PhysicalParams& p, int bath) {
  if (bath != 1 && bath != 2) {
    throw std::invalid_argument("bath_drift: bath must be 1 or 2");
  }
  Eigen::Matrix2d r;
  if (bath == 1) {
    r << 1.0, p.adiabatic, p.adiabatic, 1.0;
  } else {
    r << 0.0, 0.0, 0.0, 1.0;
  }
  return p.gamma_psinv * r;
}

Eigen::Matrix2d bath_diffusion(const PhysicalParams& p, int bath) {
  if (bath != 1 && bath != 2) {
    throw std::invalid_argument("bath_diffusion: bath must be 1 or 2");
  }
  const double n1_hot = units::bose_occupation(p.eps1_ev, p.temp1_k);
  const double n2_hot = units::bose_occupation(p.eps2_ev, p.temp1_k);
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  if (bath == 1) {
    const double cross = 0.5 * p.adiabatic * (n1_hot + n2_hot);
    m << n1_hot, cross, cross, n2_hot;
  } else {
    m(1, 1) = units::bose_occupation(p.eps2_ev, p.temp2_k);
  }
  return m;
}

EigenSystem2 drift_eigensystem(const Matrix2c& gamma) {
  const Complex a = gamma(0, 0);
  const Complex b = gamma(0, 1);
  const Complex b2 = gamma(1, 0);
  const Complex c = gamma(1, 1);

  const Complex tr = a + c;
  const Complex disc = (a - c) * (a - c) + 4.0 * b * b2;
  const Complex s = std::sqrt(disc); // principal branch: Re s >= 0

  EigenSystem2 es;
  es.lambda(0) = 0.5 * (tr + s);
  es.lambda(1) = 0.5 * (tr - s);

  const double scale = std::max(std::abs(es.lambda(0)), std::abs(es.lambda(1)));
  if (std::abs(es.lambda(0) - es.lambda(1)) < 1e-12 * scale) {
    throw DegenerateDriftError("drift_eigensystem: eigenvalue collision");
  }

  for (int k = 0; k < 2; ++k) {
    const Complex lam = es.lambda(k);
    // two algebraically equivalent constructions; pick the better conditioned
    Eigen::Vector2cd v1(b, lam - a);
    Eigen::Vector2cd v2(lam - c, b2);
    Eigen::Vector2cd v = (v1.norm() >= v2.norm()) ? v1 : v2;
    const Complex q = v(0) * v(0) + v(1) * v(1); // complex-orthogonal norm
    if (std::abs(q) > 1e-12 * v.squaredNorm()) {
      v /= std::sqrt(q);
    } else {
      v.normalize(); // quasi-null vector; biorthonormality comes from `left`
    }
    es.right.col(k) = v;
  }

  const Complex det = es.right(0, 0) * es.right(1, 1) - es.right(0, 1) * es.right(1, 0);
  if (std::abs(det) < 1e-14) {
    throw DegenerateDriftError("drift_eigensystem: eigenvector matrix is singular");
  }
  es.left << es.right(1, 1), -es.right(0, 1),
             -es.right(1, 0), es.right(0, 0);
  es.left /= det;
  return es;
}

double f_formula(double d, double w, double eps) {
  const double s = 1.0 + 4.0 * eps - 4.0 * d * d - w * w;
  const double y = w - 4.0 * eps * d;
  const double r = std::hypot(s, 2.0 * y);
  if (s >= 0.0) {
    return std::sqrt(0.5 * (s + r));
  }
  // s + r cancels for s < 0; use (r^2 - s^2)/(r - s) = 4y^2/(r - s)
  return std::sqrt(2.0) * std::abs(y) / std::sqrt(r - s);
}

std::optional<double> g_formula(double d, double w, double eps) {
  const double s = 1.0 + 4.0 * eps - 4.0 * d * d - w * w;
  const double y = w - 4.0 * eps * d;
  const double r = std::hypot(s, 2.0 * y);
  if (s < 0.0) {
    if (y == 0.0) {
      return std::nullopt; // F = 0
    }
    // -y/F with the cancellation-free F branch
    const double sign = (y > 0.0) ? 1.0 : -1.0;
    return -sign * std::sqrt(0.5 * (r - s));
  }
  const double f = std::sqrt(0.5 * (s + r));
  if (f == 0.0) {
    return std::nullopt;
  }
  return -y / f;
}

ReducedParams reduced_params(const PhysicalParams& p) {
  p.validate();
  ReducedParams rp;
  rp.d = p.u() / p.gamma_psinv;
  rp.w = (p.omega1() - p.omega2()) / p.gamma_psinv;
  rp.f_analytic = f_formula(rp.d, rp.w, p.adiabatic);
  rp.g_analytic = g_formula(rp.d, rp.w, p.adiabatic);

  const EigenSystem2 es = drift_eigensystem(build_matrices(p).gamma);
  rp.f_eigen = std::abs(es.lambda(0).real() - es.lambda(1).real()) / p.gamma_psinv;
  return rp;
}

Matrix2c langevin_drift(const PhysicalParams& p) {
  p.validate();
  const double g = p.gamma_psinv;
  Matrix2c gamma;
  gamma << kI * p.omega1() + g, kI * p.u() + 1.0 * g,
           kI * p.u() + 1.0 * g, kI * p.omega2() + 2.0 * g;
  return gamma;
}

}
