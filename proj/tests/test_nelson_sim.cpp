#include <cmath>
#include <numeric>

#include "doctest.h"
#include "nelson/closedform.hpp"
#include "nelson/errors.hpp"
#include "nelson/fpcore.hpp"
#include "nelson/nelson_sim.hpp"
#include "nelson/states.hpp"

using namespace nelson;

namespace {

EnsembleSpec base_spec(std::size_t paths, double x0, std::vector<double> times) {
  EnsembleSpec s;
  s.n_paths = paths;
  s.initial = InitialLaw::delta(x0);
  s.times = std::move(times);
  s.dt = 0.01;
  s.diffusion = 0.5;
  s.seed = 99;
  s.guard_radius = 1e-6 * std::sqrt(0.5);
  s.rate_scale = 1.0;
  s.grid = Grid1D(-6.0, 6.0, 241);
  return s;
}

}  // namespace

TEST_CASE("D = 0 reduces to the Euler map of the ODE") {
  auto s = base_spec(5000, 1.5, {1.0, 2.0});
  s.diffusion = 0.0;
  const auto r = simulate_ensemble(DriftField::restoring(1.0), s);
  const double x1 = 1.5 * std::pow(0.99, 100), x2 = 1.5 * std::pow(0.99, 200);
  CHECK(r.snapshots[0].mean == doctest::Approx(x1).epsilon(1e-12));
  CHECK(r.snapshots[1].mean == doctest::Approx(x2).epsilon(1e-12));
  CHECK(r.snapshots[1].variance < 1e-20);
  CHECK(r.snapshots[1].counts[s.grid.nearest(x2)] == 5000);
  CHECK(x2 == doctest::Approx(1.5 * std::exp(-2.0)).epsilon(2e-2));
}

TEST_CASE("OU ensemble relaxes to the ground state") {
  const std::size_t n = 40000;
  const auto r = simulate_ensemble(DriftField::restoring(1.0), base_spec(n, 2.0, {8.0}));
  const auto& e = r.snapshots[0];
  const double s0sq = 0.5;
  CHECK(std::abs(e.mean) < 3.0 * std::sqrt(s0sq / n));
  CHECK(std::abs(e.variance - s0sq) < 3.0 * std::sqrt(2.0 / n) * s0sq);
  CHECK(r.rejections == 0);
  CHECK_FALSE(r.fidelity_warning);
}

TEST_CASE("paths never leave their sector") {
  const OscillatorParams p;
  SUBCASE("n = 1 started on the right") {
    const auto r = simulate_ensemble(DriftField::from_state(StationaryState(1, p)),
                                     base_spec(20000, std::sqrt(0.5), {0.1, 0.5, 2.0}));
    CHECK(r.escaped == 0);
    for (const auto& e : r.snapshots) {
      CHECK(e.sector_masses[0] == 0.0);
      CHECK(e.below == 0);
      for (std::size_t i = 0; i < e.grid.size(); ++i)
        if (e.grid.x(i) < 0.0) CHECK(e.counts[i] == 0);
    }
  }
  SUBCASE("start near the node forces redraws") {
    // x + dt / x is smallest at x = sqrt(dt), where noise crosses the node most often.
    auto s = base_spec(4000, 0.1, {0.05});
    const auto r = simulate_ensemble(DriftField::from_state(StationaryState(1, p)), s);
    CHECK(r.rejections > 0);
    CHECK(r.escaped == 0);
    CHECK(r.snapshots[0].sector_masses[0] == 0.0);
  }
  SUBCASE("n = 2 inner sector") {
    const StationaryState s2(2, p);
    const auto r = simulate_ensemble(DriftField::from_state(s2), base_spec(20000, 0.1, {1.0, 3.0}));
    CHECK(r.escaped == 0);
    for (const auto& e : r.snapshots) {
      CHECK(e.sector_masses[0] == 0.0);
      CHECK(e.sector_masses[1] == 1.0);
      CHECK(e.sector_masses[2] == 0.0);
    }
  }
}

TEST_CASE("grid-density start keeps the sector attribution") {
  const OscillatorParams p;
  const StationaryState s2(2, p);
  const auto drift = DriftField::from_state(s2);
  const Grid1D g(-6.0, 6.0, 481);
  const auto br = split_domain(drift, g).breakpoints;
  auto rho = GridDensity::from_function(g, [](double x) { return std::exp(-2.0 * (x - 0.4) * (x - 0.4)); }, br);
  rho.normalize();
  auto s = base_spec(30000, 0.0, {0.5});
  s.initial = InitialLaw::from(rho);
  s.grid = g;
  const auto r = simulate_ensemble(drift, s);
  CHECK(r.escaped == 0);
  const double tol = 3.0 / std::sqrt(30000.0);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(r.snapshots[0].sector_masses[k] - rho.sector_masses[k]) < tol);
}

TEST_CASE("results do not depend on the partition") {
  const OscillatorParams p;
  const auto drift = DriftField::from_state(StationaryState(1, p));
  auto s = base_spec(10000, 0.4, {0.3, 1.0});
  const auto plan = kernels::plan_ensemble(drift, s);
  const auto a = kernels::ensemble_serial(plan);
  const auto b = kernels::ensemble_omp(plan);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].counts == b[i].counts);
    CHECK(a[i].sum == b[i].sum);
    CHECK(a[i].sum_sq == b[i].sum_sq);
    CHECK(a[i].rejections == b[i].rejections);
  }
  const auto r1 = simulate_ensemble(drift, s);
  const auto r2 = simulate_ensemble(drift, s);
  CHECK(r1.snapshots[1].counts == r2.snapshots[1].counts);
  CHECK(r1.snapshots[1].mean == r2.snapshots[1].mean);
  s.seed = 100;
  CHECK(simulate_ensemble(drift, s).snapshots[1].counts != r1.snapshots[1].counts);
}

TEST_CASE("compare against the own histogram is exact") {
  const auto r = simulate_ensemble(DriftField::restoring(1.0), base_spec(5000, 0.5, {1.0}));
  const auto& e = r.snapshots[0];
  const auto c = compare(e, [&](double x) { return e.values[e.grid.nearest(x)]; });
  CHECK(c.l1 < 1e-14);
  CHECK(c.ks < 1e-14);
}

TEST_CASE("OU ensemble matches the transition density") {
  const OscillatorParams p;
  const auto r = simulate_ensemble(DriftField::restoring(1.0), base_spec(50000, 1.2, {0.5, 2.0}));
  const auto kp = OUKernelParams::from(p, 1.2);
  for (const auto& e : r.snapshots) {
    const auto c = compare(e, [&](double x) { return ou_kernel(x, e.t, kp); });
    CHECK(c.ks < 1.36 / std::sqrt(50000.0) * 1.5);
  }
}

TEST_CASE("weak error halves with the step") {
  // Coarse steps (stability policy off) so the Euler bias dominates noise.
  const OscillatorParams p;
  const auto kp = OUKernelParams::from(p, 3.0 * p.sigma0());
  const double t = 1.2;
  double ratio_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double gap[2];
    for (int j = 0; j < 2; ++j) {
      auto s = base_spec(100000, 3.0 * p.sigma0(), {t});
      s.rate_scale = 0.0;
      s.dt = j == 0 ? 0.4 : 0.2;
      s.seed = seed;
      const auto e = simulate_ensemble(DriftField::restoring(1.0), s).snapshots[0];
      gap[j] = compare(e, [&](double x) { return ou_kernel(x, t, kp); }).l1;
    }
    ratio_sum += gap[0] / gap[1];
  }
  CHECK(ratio_sum / 5.0 >= 1.7);
}

TEST_CASE("spec validation") {
  const auto drift = DriftField::from_state(StationaryState(1, OscillatorParams{}));
  auto s = base_spec(100, 0.0, {1.0});
  CHECK_THROWS_AS(simulate_ensemble(drift, s), DomainError);  // start on the node
  s.initial = InitialLaw::delta(0.5);
  s.dt = 0.02;
  CHECK_THROWS_AS(simulate_ensemble(drift, s), DomainError);  // dt > 0.01 / omega
  s.dt = 0.01;
  s.n_paths = 0;
  CHECK_THROWS_AS(simulate_ensemble(drift, s), DomainError);
  s.n_paths = 10;
  s.times = {1.0, 0.5};
  CHECK_THROWS_AS(simulate_ensemble(drift, s), DomainError);
}
