#include <cmath>

#include "doctest.h"
#include "nelson/closedform.hpp"
#include "nelson/errors.hpp"
#include "nelson/fpcore.hpp"
#include "nelson/spectral.hpp"
#include "nelson/states.hpp"
#include "oracle_values.hpp"

using namespace nelson;

namespace {

const OscillatorParams kScaled = OscillatorParams::from_width(1.0, 1.0);  // D = 1

EigenSystem fd_sector(int n, double lo, double hi, std::size_t points, int k) {
  const auto drift = DriftField::from_state(StationaryState(n, kScaled));
  return solve_eigs_fd(build_sl(drift, 1.0, lo, hi), Grid1D(lo, hi, points), k);
}

}  // namespace

TEST_CASE("shooting on the inner sector of n = 2") {
  const auto r = solve_eigs_shooting(2, -1.0, 1.0, 3);
  const auto odd = r.nonzero(Parity::odd);
  const auto even = r.nonzero(Parity::even);
  REQUIRE(odd.size() == 3);
  REQUIRE(even.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(odd[i] == doctest::Approx(oracle::kInnerOdd[i]).epsilon(1e-7));
    CHECK(even[i] == doctest::Approx(oracle::kInnerEven[i]).epsilon(1e-7));
  }
  CHECK(r.roots.front().mu == 0.0);
}

TEST_CASE("shooting on the outer sector of n = 2") {
  const auto r = solve_eigs_shooting(2, 1.0, kShootingTruncation, 3);
  const auto mus = r.mus();
  REQUIRE(mus.size() == 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(mus[i + 1] == doctest::Approx(oracle::kOuterCut8[i]).epsilon(1e-8));
    // The cut at x = 8 lies close to the turning point of the higher modes.
    CHECK(mus[i + 1] == doctest::Approx(oracle::kOuter[i]).epsilon(2e-4));
  }
}

TEST_CASE("half line of n = 1 has spectrum 0, 2, 4, ...") {
  const auto r = solve_eigs_shooting(1, 0.0, kShootingTruncation, 3);
  const auto mus = r.mus();
  REQUIRE(mus.size() == 4);
  for (int i = 1; i < 4; ++i) {
    CHECK(mus[i] == doctest::Approx(oracle::kHalfLineCut8[i - 1]).epsilon(1e-8));
    CHECK(mus[i] == doctest::Approx(2.0 * i).epsilon(1e-5));
  }
  const auto fd = fd_sector(1, 0.0, kShootingTruncation, 2001, 4);
  CHECK(std::abs(fd.eigenvalues[0]) < 1e-9);
  for (int i = 1; i < 4; ++i) CHECK(fd.eigenvalues[i] == doctest::Approx(2.0 * i).epsilon(1e-3));
}

TEST_CASE("finite differences agree with shooting") {
  const auto fd = fd_sector(2, -1.0, 1.0, 2001, 7);
  const auto sh = solve_eigs_shooting(2, -1.0, 1.0, 3).mus();
  REQUIRE(sh.size() == 7);
  for (int i = 1; i < 7; ++i) CHECK(fd.eigenvalues[i] == doctest::Approx(sh[i]).epsilon(1e-3));
  CHECK(fd.parity[1] == Parity::odd);
  CHECK(fd.parity[2] == Parity::even);
  CHECK(fd.resolution_change < 5e-3);
  CHECK(fd.warnings.empty());
}

TEST_CASE("eigenfunctions oscillate in order") {
  const auto inner = fd_sector(2, -1.0, 1.0, 1001, 6);
  const auto outer = fd_sector(2, 1.0, 8.0, 1401, 6);
  for (std::size_t j = 0; j < 6; ++j) {
    CAPTURE(j);
    CHECK(count_sign_changes(inner.functions[j]) == static_cast<int>(j));
    CHECK(count_sign_changes(outer.functions[j]) == static_cast<int>(j));
  }
}

TEST_CASE("symmetric potential of the n = 1 drift") {
  const auto drift = DriftField::from_state(StationaryState(1, kScaled));
  const auto sl = build_sl(drift, 1.0, 0.0, 8.0);
  for (double x : {0.1, 0.5, 2.0, 5.0}) CHECK(sl.q(x) == doctest::Approx(x * x / 4.0 - 1.5).epsilon(1e-9));
  CHECK(sl.left == BoundaryKind::dirichlet);
  CHECK(sl.right == BoundaryKind::zero_flux);
}

TEST_CASE("solver input checks") {
  CHECK_THROWS_AS(fd_sector(2, -1.0, 1.0, 101, 30), DomainError);
  CHECK_THROWS_AS(solve_eigs_shooting(3, -1.0, 1.0, 3), DomainError);
  CHECK_THROWS_AS(solve_eigs_shooting(2, -0.5, 1.0, 3), DomainError);
}

TEST_CASE("spectral reconstruction of the decay") {
  const auto p = kScaled;
  const double L = 8.0;
  const Grid1D g(-L, L, 1601);
  const auto drift = DriftField::restoring(p.omega);
  const auto sys = solve_eigs_fd(build_sl(drift, p.diffusion(), -L, L), g, 12);
  const auto h = invariant_density(drift, p.diffusion(), g);
  const StationaryState s1(1, p);
  const auto rho = GridDensity::from_function(g, [&](double x) { return s1.density(x); });
  const auto c = expand(rho, sys, h);
  CHECK(c.coefficients[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(c.coefficients[1]) < 1e-8);  // odd modes absent
  for (double t : {0.2, 1.0, 3.0}) {
    const auto snap = spectral_density(sys, c.coefficients, h, t);
    CHECK(l1_distance(snap.density, [&](double x) { return decay_mixture(x, t, p); }) < 1e-3);
  }
}
