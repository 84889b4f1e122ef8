#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nelson/errors.hpp"
#include "nelson/grid.hpp"
#include "nelson/states.hpp"
#include "oracle_values.hpp"

using namespace nelson;

TEST_CASE("unit conventions") {
  const OscillatorParams p;
  CHECK(p.diffusion() == 0.5);
  CHECK(p.sigma0_sq() == 0.5);
  const auto fig = OscillatorParams::from_width(1.0, 1.0);
  CHECK(fig.hbar == doctest::Approx(2.0));
  CHECK(fig.diffusion() == doctest::Approx(1.0));
  CHECK(fig.sigma0() == doctest::Approx(1.0));
  CHECK_THROWS_AS((OscillatorParams{1.0, -1.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((OscillatorParams{1.0, 1.0, 0.0}.validate()), DomainError);
}

TEST_CASE("eigenstate density and drift match high-precision values") {
  const StationaryState s(3, OscillatorParams{});
  const double xs[] = {0.4, -1.7, 4.0};
  for (int i = 0; i < 3; ++i) {
    CHECK(s.density(xs[i]) == doctest::Approx(oracle::kPhi3[i]).epsilon(1e-12));
    CHECK(s.drift(xs[i]) == doctest::Approx(oracle::kDrift3[i]).epsilon(1e-12));
  }
  CHECK(s.energy() == doctest::Approx(3.5));
}

TEST_CASE("nodes are the Hermite zeros") {
  const StationaryState s(4, OscillatorParams{});
  REQUIRE(s.nodes().size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(s.nodes()[i] == doctest::Approx(oracle::kNodes4[i]).epsilon(1e-12));
  CHECK(StationaryState(0, OscillatorParams{}).nodes().empty());
}

TEST_CASE("densities are normalized") {
  const auto p = OscillatorParams::from_width(0.7, 1.3);
  const Grid1D g(-12 * 0.7, 12 * 0.7, 4001);
  for (int n = 0; n <= 6; ++n) {
    std::vector<double> v(g.size());
    const StationaryState s(n, p);
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = s.density(g.x(i));
    CHECK(trapezoid(g, v) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("curvature ratio obeys the eigenvalue equation") {
  // phi''/phi = x^2 - (2n + 1) for m = hbar = omega = 1.
  for (int n = 0; n < 5; ++n) {
    const StationaryState s(n, OscillatorParams{});
    for (double x : {-2.3, 0.37, 1.1, 6.5}) {
      CHECK(s.curvature_ratio(x) == doctest::Approx(x * x - (2 * n + 1)).epsilon(1e-10));
    }
  }
}

TEST_CASE("drift derivative is consistent with the drift") {
  const StationaryState s(2, OscillatorParams::from_width(1.0, 1.0));
  for (double x : {-2.0, 0.3, 1.6}) {
    const double h = 1e-5;
    const double fd = (s.drift(x + h) - s.drift(x - h)) / (2 * h);
    CHECK(s.drift_derivative(x) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("tail quantities stay finite where phi underflows") {
  const StationaryState s(5, OscillatorParams{});
  CHECK(s.density(60.0) == 0.0);
  CHECK(std::isfinite(s.drift(60.0)));
  CHECK(s.log_abs_amplitude(60.0) < -1000.0);
}

TEST_CASE("singular drift at nodes") {
  const StationaryState s(1, OscillatorParams{});
  CHECK_THROWS_AS(s.drift(0.0), SingularityError);
  try {
    stationary_drift(s, 0.0);
  } catch (const SingularityError& e) {
    CHECK(e.location() == 0.0);
    CHECK(e.node_index() == 0);
  }
  CHECK(std::isinf(s.log_abs_amplitude(0.0)));
  CHECK_THROWS_AS(StationaryState(-1, OscillatorParams{}), DomainError);
  CHECK_THROWS_AS(StationaryState(kMaxOscillatorLevel + 1, OscillatorParams{}), DomainError);
}

TEST_CASE("coherent state moves on the classical orbit") {
  const OscillatorParams p;
  const double a = 0.8, t = 0.9;
  const auto g = coherent_state(a, t, p);
  CHECK(g.mean == doctest::Approx(a * std::cos(t)));
  CHECK(g.variance == doctest::Approx(p.sigma0_sq()));
  CHECK(g.drift(0.2) == doctest::Approx(a * (std::cos(t) - std::sin(t)) - 0.2));
  const double peak = 1.0 / std::sqrt(2.0 * std::numbers::pi * p.sigma0_sq());
  CHECK(g.density(g.mean) == doctest::Approx(peak));
}
