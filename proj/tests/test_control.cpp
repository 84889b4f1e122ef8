#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "nelson/control.hpp"
#include "nelson/errors.hpp"
#include "oracle_values.hpp"

using namespace nelson;

namespace {

double sup_diff(const std::function<double(double)>& f, const std::function<double(double)>& g, double lo,
                double hi, int n) {
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    worst = std::max(worst, std::abs(f(x) - g(x)));
  }
  return worst;
}

}  // namespace

TEST_CASE("stationary flows give back the oscillator potential") {
  const auto p = OscillatorParams::from_width(1.0, 1.0);
  for (int n : {0, 1, 2}) {
    const auto pair = stationary_flow(n, p);
    const double t = 0.7;
    // 999 intervals keep every sample off the nodes.
    const double err = sup_diff([&](double x) { return synthesize_potential(pair, x, t); },
                                [&](double x) { return p.potential(x); }, -5.0, 5.0, 999);
    CAPTURE(n);
    CHECK(err < 1e-8);
  }
  CHECK_THROWS_AS(synthesize_potential(stationary_flow(1, p), 0.0, 0.0), SingularityError);
}

TEST_CASE("closed-form potentials match the definition") {
  const OscillatorParams p;
  for (int i = 0; i < 4; ++i) {
    const double x = oracle::kVcPts[2 * i], t = oracle::kVcPts[2 * i + 1];
    CAPTURE(i);
    CHECK(ou_relaxation_potential(x, t, p, 0.8) == doctest::Approx(oracle::kVcOU[i]).epsilon(1e-11));
    CHECK(decay_potential(x, t, p) == doctest::Approx(oracle::kVcDecay[i]).epsilon(1e-11));
    const double xe = oracle::kVcExcitedPts[2 * i], te = oracle::kVcExcitedPts[2 * i + 1];
    CHECK(excited_relaxation_potential(xe, te, p, 0.8) == doctest::Approx(oracle::kVcExcited[i]).epsilon(1e-10));
  }
}

TEST_CASE("synthesized potentials of the library flows") {
  const OscillatorParams p;
  const auto ou = ou_relaxation_flow(p, 0.8);
  const auto ex = excited_relaxation_flow(p, -0.8);
  const auto dc = decay_flow(p);
  for (double t : {0.1, 0.9, 3.0}) {
    for (double x : {-2.0, -0.6, 0.4, 1.7}) {
      CHECK(synthesize_potential(ou, x, t) == doctest::Approx(ou_relaxation_potential(x, t, p, 0.8)).epsilon(1e-8));
      CHECK(synthesize_potential(dc, x, t) == doctest::Approx(decay_potential(x, t, p)).epsilon(1e-8));
      if (x < 0) {
        CHECK(synthesize_potential(ex, x, t) ==
              doctest::Approx(excited_relaxation_potential(x, t, p, -0.8)).epsilon(1e-8));
      }
    }
  }
  CHECK_THROWS_AS(synthesize_potential(ex, 0.5, 1.0), SingularityError);
}

TEST_CASE("gauge covariance of phase and potential") {
  const OscillatorParams p;
  const auto base = decay_flow(p);
  const auto shifted = with_gauge(base, [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); });
  const auto numeric = with_gauge(base, [](double t) { return t * t; }, nullptr);
  for (double t : {0.3, 1.1}) {
    for (double x : {-1.0, 0.2, 2.0}) {
      CHECK(synthesize_potential(shifted, x, t) - synthesize_potential(base, x, t) ==
            doctest::Approx(std::cos(t)).epsilon(1e-10));
      CHECK(synthesize_phase(shifted, x, t) - synthesize_phase(base, x, t) ==
            doctest::Approx(-std::sin(t)).epsilon(1e-12));
      CHECK(synthesize_potential(numeric, x, t) - synthesize_potential(base, x, t) ==
            doctest::Approx(2 * t).epsilon(1e-7));
    }
  }
}

TEST_CASE("switch function contract") {
  for (int n : {2, 3, 5}) {
    const SmoothSwitch f(n, 1.3);
    CHECK(f.value(0.0) == 1.0);
    CHECK(f.value(50 * 1.3) < 1e-9);
    const double h = 1e-4;
    CHECK(std::abs((f.value(h) - f.value(-h)) / (2 * h)) < 1e-6);
    CHECK(f.derivative(0.0) == 0.0);
    double series = 0.0;
    for (int k = 1; k <= n; ++k) series += f.coefficient(k) * std::exp(-f.omega_k(k) * 0.7);
    CHECK(series == doctest::Approx(f.value(0.7)).epsilon(1e-13));
  }
  CHECK(smooth_switch(1.0, 2, 1.0) == doctest::Approx(0.75));  // 1 - (1 - 1/2)^2
  CHECK_THROWS_AS(SmoothSwitch(1, 1.0), DomainError);
  CHECK_THROWS_AS(SmoothSwitch(2, 0.0), DomainError);
}

TEST_CASE("coherent transition coefficients and potential") {
  CoherentTransition c;
  c.displacement = 0.7;
  c.order = 3;
  c.tau = 1.1;
  c.params = OscillatorParams{1.0, 1.0, 1.3};
  for (int k = 1; k <= 5; ++k) {
    const double t = std::numbers::pi / (4 * c.params.omega);
    CHECK(c.w_coefficient(k) == doctest::Approx(std::sqrt(2.0) * c.u_coefficient(k, t)).epsilon(1e-12));
  }
  for (int k = 1; k <= 3; ++k) CHECK(c.w_coefficient(k) == doctest::Approx(oracle::kSwitchW[k - 1]).epsilon(1e-12));
  for (int i = 0; i < 3; ++i) {
    const double x = oracle::kCoherentPts[2 * i], t = oracle::kCoherentPts[2 * i + 1];
    CHECK(c.mean(t) == doctest::Approx(oracle::kCoherentMean[i]).epsilon(1e-11));
    CHECK(coherent_transition_potential(x, t, c) == doctest::Approx(oracle::kVcCoherent[i]).epsilon(1e-10));
  }
  // Continuity with the free oscillator at t = 0.
  CHECK(coherent_transition_potential(1.3, 0.0, c) == doctest::Approx(c.params.potential(1.3)).epsilon(1e-14));
  const auto pair = coherent_transition_flow(c);
  for (double t : {0.2, 1.7})
    for (double x : {-0.8, 0.5})
      CHECK(synthesize_potential(pair, x, t) == doctest::Approx(coherent_transition_potential(x, t, c)).epsilon(1e-7));
}

TEST_CASE("squeeze schedule") {
  const SqueezeSpec s{1.0, 2.0, 1.0, 1.0, 1.0};
  const auto z = squeeze_schedule(s, 0.0);
  CHECK(z.phase_curvature == 1.0 / 6.0);
  CHECK(z.omega_sq == 16.0 / 81.0);
  CHECK(z.phase_offset == 0.0);
  CHECK(z.c == 0.0);
  for (int i = 0; i < 5; ++i) {
    const auto sc = squeeze_schedule(s, oracle::kSqueezeT[i]);
    CAPTURE(i);
    CHECK(sc.phase_curvature == doctest::Approx(oracle::kSqueezeOmega[i]).epsilon(1e-12));
    CHECK(sc.phase_offset == doctest::Approx(oracle::kSqueezeDelta[i]).epsilon(1e-12));
    CHECK(sc.omega_sq == doctest::Approx(oracle::kSqueezeOmega2[i]).epsilon(1e-12));
    CHECK(sc.c == doctest::Approx(oracle::kSqueezeC[i]).scale(1.0).epsilon(1e-12));
  }
  CHECK(squeeze_schedule(s, -60.0).omega_sq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(squeeze_schedule(s, 60.0).omega_sq == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK_THROWS_AS((SqueezeSpec{1.0, -2.0, 1.0, 1.0, 1.0}.validate()), DomainError);
}

TEST_CASE("generic Gaussian schedule agrees with the closed-form squeeze") {
  const SqueezeSpec s{1.0, 2.0, 1.0, 1.0, 1.0};
  auto h = s.history();
  h.nu_dot = nullptr;  // force the numeric derivatives
  h.nu_ddot = nullptr;
  h.theta_dot = nullptr;
  for (double t : {-3.0, -0.5, 0.0, 1.2, 4.0}) {
    const auto a = gaussian_schedule(h, s.diffusion, s.mass, s.sigma0, t);
    const auto b = squeeze_schedule(s, t);
    CHECK(a.phase_curvature == doctest::Approx(b.phase_curvature).scale(1.0).epsilon(1e-8));
    CHECK(a.omega_sq == doctest::Approx(b.omega_sq).scale(1.0).epsilon(1e-7));
    CHECK(a.c == doctest::Approx(b.c).scale(1.0).epsilon(1e-7));
    CHECK(a.phase_offset == doctest::Approx(b.phase_offset).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("moving Gaussian schedule solves the Madelung equation") {
  // N(mu, nu) with mu = 0.4 sin 1.3t, nu = 0.5 + 0.2 sin t, driven by the
  // linear drift alpha + beta x that transports it.
  const double D = 0.5, m = 1.0, hbar = 1.0;
  GaussianHistory g;
  g.mu = [](double t) { return 0.4 * std::sin(1.3 * t); };
  g.nu = [](double t) { return 0.5 + 0.2 * std::sin(t); };
  g.theta = [](double t) { return 0.3 * t + 0.1 * std::cos(t); };
  const auto beta = [&](double t) { return (0.2 * std::cos(t) - 2 * D) / (2 * g.nu(t)); };
  const auto alpha = [&](double t) { return 0.52 * std::cos(1.3 * t) - beta(t) * g.mu(t); };
  FlowPair pair;
  pair.mass = m;
  pair.hbar = hbar;
  pair.length_scale = std::sqrt(0.5);
  pair.density = [&](double x, double t) {
    const double v = g.nu(t), d = x - g.mu(t);
    return std::exp(-d * d / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
  };
  pair.drift = [&](double x, double t) { return alpha(t) + beta(t) * x; };
  pair.drift_potential = [&](double x, double t) { return alpha(t) * x + 0.5 * beta(t) * x * x; };
  pair.theta = g.theta;
  const std::vector<double> xs{-1.0, -0.2, 0.5, 1.4};
  const std::vector<double> ts{0.3, 1.0, 2.2};
  for (double t : ts) {
    const auto sc = gaussian_schedule(g, D, m, pair.length_scale, t);
    for (double x : xs) {
      CHECK(sc.potential(x, m) == doctest::Approx(synthesize_potential(pair, x, t)).epsilon(1e-6));
      CHECK(sc.phase(x, m) == doctest::Approx(synthesize_phase(pair, x, t)).epsilon(1e-9));
    }
  }
  const auto f = madelung_fields(pair, [&](double x, double t) {
    return gaussian_schedule(g, D, m, pair.length_scale, t).potential(x, m);
  });
  CHECK(madelung_residual(f, xs, ts) < 1e-5);
  GaussianHistory collapsed = g;
  collapsed.nu = [](double) { return -1.0; };
  CHECK_THROWS_AS(gaussian_schedule(collapsed, D, m, 1.0, 0.0), DomainError);
}

TEST_CASE("Madelung residuals of the library flows") {
  const OscillatorParams p;
  const std::vector<double> ts{0.4, 1.0, 2.5};
  const std::vector<double> right{0.3, 0.9, 1.6, 2.4};
  const std::vector<double> all{-1.5, -0.3, 0.4, 1.8};
  auto check = [&](const FlowPair& pair, Field v, const std::vector<double>& xs) {
    const double r = madelung_residual(madelung_fields(pair, std::move(v)), xs, ts);
    CHECK(r < 1e-4);
  };
  check(ou_relaxation_flow(p, 0.8), [&](double x, double t) { return ou_relaxation_potential(x, t, p, 0.8); }, all);
  check(excited_relaxation_flow(p, 0.8), [&](double x, double t) { return excited_relaxation_potential(x, t, p, 0.8); }, right);
  check(decay_flow(p), [&](double x, double t) { return decay_potential(x, t, p); }, all);
  // A wrong potential is caught.
  const double bad = madelung_residual(
      madelung_fields(ou_relaxation_flow(p, 0.8), [&](double x, double t) { return 1.01 * ou_relaxation_potential(x, t, p, 0.8); }),
      all, ts);
  CHECK(bad > 1e-3);
}
