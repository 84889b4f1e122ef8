#include <cmath>

#include "doctest.h"
#include "nelson/errors.hpp"
#include "nelson/grid.hpp"
#include "nelson/states.hpp"

using namespace nelson;

TEST_CASE("grid geometry") {
  const Grid1D g(-2.0, 3.0, 51);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.x(0) == -2.0);
  CHECK(g.x(50) == 3.0);
  double w = 0;
  for (double v : g.trapezoid_weights()) w += v;
  CHECK(w == doctest::Approx(5.0));
  CHECK(g.nearest(-10.0) == 0);
  CHECK(g.nearest(10.0) == 50);
  CHECK(g.nearest(0.04) == 20);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 15), DomainError);
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 100), DomainError);
}

TEST_CASE("sector masses follow the breakpoints") {
  const Grid1D g(-5.0, 5.0, 1001);
  const StationaryState s(2, OscillatorParams{});
  std::vector<double> br(s.nodes().begin(), s.nodes().end());
  auto rho = GridDensity::from_function(g, [&](double x) { return s.density(x); }, br);
  REQUIRE(rho.sector_masses.size() == 3);
  CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rho.sector_masses[0] == doctest::Approx(rho.sector_masses[2]).epsilon(1e-12));
  CHECK(rho.sector_masses[0] + rho.sector_masses[1] + rho.sector_masses[2] == doctest::Approx(rho.mass()));
}

TEST_CASE("delta and normalize") {
  const Grid1D g(0.0, 1.0, 101);
  const auto d = GridDensity::delta(g, 0.333);
  CHECK(d.mass() == doctest::Approx(1.0));
  CHECK(d.values[33] > 0.0);
  auto r = GridDensity::from_function(g, [](double x) { return 3.0 * x; });
  r.normalize();
  CHECK(r.mass() == doctest::Approx(1.0));
  auto zero = GridDensity::from_function(g, [](double) { return 0.0; });
  CHECK_THROWS_AS(zero.normalize(), DomainError);
  CHECK_THROWS_AS(GridDensity(g, std::vector<double>(5, 1.0)), DomainError);
}

TEST_CASE("distances") {
  const Grid1D g(0.0, 1.0, 101);
  const auto a = GridDensity::from_function(g, [](double) { return 1.0; });
  const auto b = GridDensity::from_function(g, [](double) { return 1.5; });
  CHECK(l1_distance(a, b) == doctest::Approx(0.5));
  CHECK(l1_distance(a, [](double) { return 0.0; }) == doctest::Approx(1.0));
  CHECK(sup_distance(a, [](double x) { return x; }) == doctest::Approx(1.0));
}

TEST_CASE("drift fields") {
  const auto r = DriftField::restoring(2.0);
  CHECK(r(0.5) == -1.0);
  CHECK(r.singularities->empty());
  const auto lin = DriftField::linear([](double t) { return t; }, [](double) { return 3.0; });
  CHECK(lin(2.0, 1.0) == 7.0);
  CHECK(lin.time_dependent);
  const auto st = DriftField::from_state(StationaryState(3, OscillatorParams{}));
  CHECK(st.singularities->size() == 3);
  CHECK(st(1.0) == doctest::Approx(StationaryState(3, OscillatorParams{}).drift(1.0)));
}
