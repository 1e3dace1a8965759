#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "vibroq/errors.hpp"
#include "vibroq/model.hpp"
#include "vibroq/units.hpp"

#include "test_support.hpp"

using namespace vibroq;
using model::Complex;
using model::Matrix2c;
using model::PhysicalParams;
using vibroq::testing::close_rel;
using vibroq::testing::random_complex_symmetric;
using vibroq::testing::random_params;

namespace {

PhysicalParams table1() {
  return PhysicalParams{0.434, 0.284, 0.1, 10.0, 5600.0, 2100.0, 1.0};
}

}

TEST_CASE("parameter validation") {
  PhysicalParams p = table1();
  p.adiabatic = 1.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = table1();
  p.gamma_psinv = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = table1();
  p.temp2_k = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = table1();
  p.eps2_ev = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("decoupled drift is diagonal") {
  PhysicalParams p = table1();
  p.delta_ev = 0.0;
  p.adiabatic = 0.0;
  p.gamma_psinv = 1.0;
  const auto mm = model::build_matrices(p);
  CHECK(mm.gamma(0, 1) == Complex(0.0, 0.0));
  CHECK(mm.gamma(1, 0) == Complex(0.0, 0.0));
  CHECK(mm.gamma(0, 0) == Complex(1.0, p.omega1()));
  CHECK(mm.gamma(1, 1) == Complex(2.0, p.omega2()));
}

TEST_CASE("drift entries at the temperature-study parameters") {
  const auto mm = model::build_matrices(table1());
  // u = 0.1 eV / hbar, evaluated independently at high precision
  CHECK(mm.gamma(0, 1) == Complex(10.0, 0.1 / units::hbar_ev_ps));
  CHECK(close_rel(mm.gamma(0, 1).imag(), 151.92674479961274, 1e-14));
  CHECK(mm.gamma(0, 1) == mm.gamma(1, 0));
}

TEST_CASE("zero-temperature diffusion vanishes") {
  PhysicalParams p = table1();
  p.temp1_k = 0.0;
  p.temp2_k = 0.0;
  const auto mm = model::build_matrices(p);
  CHECK(mm.m.cwiseAbs().maxCoeff() == 0.0);
  const auto y = model::diffusion_occupations(p);
  CHECK(y.y11 == 0.0);
  CHECK(y.y22 == 0.0);
  CHECK(y.y1221 == 0.0);
}

TEST_CASE("occupation channels") {
  PhysicalParams p = table1();
  SUBCASE("cold bath off leaves only the hot-bath channel") {
    p.temp2_k = 0.0;
    const auto y = model::diffusion_occupations(p);
    CHECK(y.y22 == units::bose_occupation(p.eps2_ev, p.temp1_k));
  }
  SUBCASE("values at the study temperatures") {
    const auto y = model::diffusion_occupations(p);
    CHECK(close_rel(y.y11, 0.68586857798091932, 1e-14));
    CHECK(close_rel(y.y22, 1.510860995, 1e-9));
    CHECK(close_rel(y.y1221, 1.933823171, 1e-9));
  }
  SUBCASE("bath split sums to the full diffusion matrix") {
    const auto mm = model::build_matrices(p);
    const Eigen::Matrix2d sum = model::bath_diffusion(p, 1) + model::bath_diffusion(p, 2);
    CHECK((mm.m - sum.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("embeddings carry the block structure") {
  const auto mm = model::build_matrices(table1());
  CHECK((mm.sigma.block<2, 2>(0, 0) - mm.gamma).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mm.sigma.block<2, 2>(2, 2) - mm.gamma.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(mm.sigma.block<2, 2>(0, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((mm.d.block<2, 2>(0, 2) - 10.0 * mm.m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(mm.d.block<2, 2>(0, 0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reduced parameters in closed form") {
  SUBCASE("uncoupled resonant point") {
    PhysicalParams p = table1();
    p.delta_ev = 0.0;
    p.eps2_ev = p.eps1_ev;
    p.adiabatic = 0.0;
    const auto rp = model::reduced_params(p);
    CHECK(rp.d == 0.0);
    CHECK(rp.w == 0.0);
    CHECK(rp.f_analytic == 1.0);
    CHECK(rp.g_analytic.has_value());
    CHECK(*rp.g_analytic == 0.0);
  }
  SUBCASE("full coupling at the resonant point gives sqrt(5)") {
    CHECK(close_rel(model::f_formula(0.0, 0.0, 1.0), 2.2360679774997897, 1e-15));
  }
  SUBCASE("temperature-study values") {
    const auto rp = model::reduced_params(table1());
    CHECK(close_rel(rp.d, 15.192674479961274, 1e-14));
    CHECK(close_rel(rp.w, 22.789011719941911, 1e-14));
    CHECK(close_rel(rp.f_analytic, 1.0013883002385516, 1e-12));
    CHECK(close_rel(rp.f_eigen, rp.f_analytic, 1e-10));
  }
}

TEST_CASE("identity for F^2 + G^2 over random samples") {
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> ud(-40.0, 40.0);
  std::uniform_real_distribution<double> ue(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double d = ud(rng);
    const double w = ud(rng);
    const double eps = ue(rng);
    const double f = model::f_formula(d, w, eps);
    const auto g = model::g_formula(d, w, eps);
    if (!g) {
      continue;
    }
    const double s = 1.0 + 4.0 * eps - 4.0 * d * d - w * w;
    const double rhs = std::hypot(s, 2.0 * (w - 4.0 * eps * d));
    CHECK(close_rel(f * f + *g * *g, rhs, 1e-12));
  }
}

TEST_CASE("F is independent of the bath temperatures") {
  PhysicalParams p = table1();
  const auto a = model::reduced_params(p);
  p.temp1_k = 77.0;
  p.temp2_k = 0.0;
  const auto b = model::reduced_params(p);
  CHECK(a.f_analytic == b.f_analytic); // bit identical
  CHECK(a.f_eigen == b.f_eigen);
}

TEST_CASE("drift eigensystem") {
  SUBCASE("diagonal matrix") {
    PhysicalParams p = table1();
    p.delta_ev = 0.0;
    p.adiabatic = 0.0;
    const auto mm = model::build_matrices(p);
    const auto es = model::drift_eigensystem(mm.gamma);
    // eigenvalues in some order; match by real part
    const double re_lo = std::min(es.lambda(0).real(), es.lambda(1).real());
    const double re_hi = std::max(es.lambda(0).real(), es.lambda(1).real());
    CHECK(close_rel(re_lo, p.gamma_psinv, 1e-14));
    CHECK(close_rel(re_hi, 2.0 * p.gamma_psinv, 1e-14));
  }

  SUBCASE("trace and rate-splitting identities over random parameters") {
    std::mt19937 rng(77);
    for (int i = 0; i < 500; ++i) {
      const auto p = random_params(rng);
      const auto mm = model::build_matrices(p);
      model::EigenSystem2 es;
      try {
        es = model::drift_eigensystem(mm.gamma);
      } catch (const DegenerateDriftError&) {
        continue;
      }
      const Complex tr = mm.gamma.trace();
      CHECK(close_rel(tr.real(), 3.0 * p.gamma_psinv, 1e-12));
      CHECK(close_rel(es.lambda(0).real() + es.lambda(1).real(), 3.0 * p.gamma_psinv,
                      1e-12));
      // reconstruction against the definition
      const Matrix2c rebuilt =
          es.right * es.lambda.asDiagonal() * es.left;
      CHECK((rebuilt - mm.gamma).norm() <= 1e-12 * mm.gamma.norm());
      const Matrix2c bi = es.left * es.right;
      CHECK((bi - Matrix2c::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SUBCASE("random complex-symmetric reconstruction and transpose structure") {
    std::mt19937 rng(99);
    for (int i = 0; i < 500; ++i) {
      const Matrix2c g = random_complex_symmetric(rng, 5.0);
      model::EigenSystem2 es;
      try {
        es = model::drift_eigensystem(g);
      } catch (const DegenerateDriftError&) {
        continue;
      }
      const Matrix2c rebuilt = es.right * es.lambda.asDiagonal() * es.left;
      CHECK((rebuilt - g).norm() <= 1e-12 * std::max(1.0, g.norm()));
      CHECK((es.left - es.right.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  SUBCASE("degenerate input is rejected") {
    Matrix2c g = Matrix2c::Identity();
    CHECK_THROWS_AS(model::drift_eigensystem(g), DegenerateDriftError);
  }
}

TEST_CASE("rate splitting at the coupling endpoints") {
  std::mt19937 rng(4321);
  for (int i = 0; i < 200; ++i) {
    auto p = random_params(rng);
    for (double eps : {0.0, 1.0}) {
      p.adiabatic = eps;
      const auto rp = model::reduced_params(p);
      CHECK(close_rel(rp.f_analytic, rp.f_eigen, 1e-10, 1e-12));
      const auto es = model::drift_eigensystem(model::build_matrices(p).gamma);
      const double slow = std::min(es.lambda(0).real(), es.lambda(1).real());
      CHECK(close_rel(0.5 * p.gamma_psinv * (3.0 - rp.f_analytic), slow, 1e-10, 1e-12));
    }
  }
}

TEST_CASE("langevin drift equals the full-coupling drift") {
  PhysicalParams p = table1();
  p.adiabatic = 0.25; // langevin_drift must ignore the dial
  const Matrix2c l = model::langevin_drift(p);
  p.adiabatic = 1.0;
  const Matrix2c g = model::build_matrices(p).gamma;
  CHECK(l == g);
  CHECK(l(0, 1) == Complex(10.0, 0.1 / units::hbar_ev_ps));

  PhysicalParams q = table1();
  q.delta_ev = 1e-300; // effectively u = 0 while staying valid
  q.gamma_psinv = 1e-12;
  const Matrix2c l0 = model::langevin_drift(q);
  CHECK(close_rel(l0(0, 0).imag(), q.omega1(), 1e-15));
  CHECK(std::abs(l0(0, 1)) < 1e-11);
}
