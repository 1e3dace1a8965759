#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "vibroq/units.hpp"

#include "test_support.hpp"

using namespace vibroq;
using units::Unit;
using vibroq::testing::close_rel;

TEST_CASE("physical constants are pinned") {
  CHECK(units::hbar_ev_ps == 6.582119569e-4);
  CHECK(units::kb_ev_per_k == 8.617333262e-5);
  CHECK(units::cm1_per_ev == 8065.543937);
}

TEST_CASE("bose occupation limits and values") {
  CHECK(units::bose_occupation(0.2, 0.0) == 0.0);

  // energy equal to kT: 1/(e - 1), evaluated independently at high precision
  const double t = 0.25 / units::kb_ev_per_k;
  CHECK(close_rel(units::bose_occupation(0.25, t), 0.58197670686932642, 1e-14));

  // hot-bath occupation of the 0.434 eV mode (high-precision evaluation)
  CHECK(close_rel(units::bose_occupation(0.434, 5600.0), 0.68586857798091932, 1e-14));

  CHECK_THROWS_AS(units::bose_occupation(0.0, 300.0), std::domain_error);
  CHECK_THROWS_AS(units::bose_occupation(-0.1, 300.0), std::domain_error);
  CHECK_THROWS_AS(units::bose_occupation(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("bose occupation monotonicity") {
  const std::vector<double> energies = {0.05, 0.1, 0.2, 0.4, 0.8};
  const std::vector<double> temps = {50.0, 300.0, 1000.0, 3000.0, 9000.0};
  for (double e : energies) {
    for (std::size_t i = 0; i + 1 < temps.size(); ++i) {
      CHECK(units::bose_occupation(e, temps[i]) < units::bose_occupation(e, temps[i + 1]));
    }
  }
  for (double t : temps) {
    for (std::size_t i = 0; i + 1 < energies.size(); ++i) {
      CHECK(units::bose_occupation(energies[i], t) >
            units::bose_occupation(energies[i + 1], t));
    }
  }
}

TEST_CASE("unit conversions") {
  CHECK(units::convert(0.0, Unit::Ev, Unit::WavenumberCm1) == 0.0);
  CHECK(units::convert(1.0, Unit::Ev, Unit::WavenumberCm1) == 8065.543937);
  CHECK(close_rel(units::convert(3500.0, Unit::WavenumberCm1, Unit::Ev),
                  0.4339446945349893, 1e-14));
  CHECK(close_rel(units::convert(0.1, Unit::Ev, Unit::AngularPsInv),
                  151.92674479961274, 1e-14));
}

TEST_CASE("conversion round trips at 1e-12 relative") {
  const Unit all[] = {Unit::Ev, Unit::WavenumberCm1, Unit::AngularPsInv, Unit::Kelvin};
  for (Unit from : all) {
    for (Unit to : all) {
      for (double x = 1e-6; x <= 1e6; x *= 97.0) {
        const double back = units::convert(units::convert(x, from, to), to, from);
        CHECK(close_rel(back, x, 1e-12));
      }
    }
  }
}
