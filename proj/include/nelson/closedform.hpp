#pragma once

#include "nelson/fpcore.hpp"
#include "nelson/states.hpp"

namespace nelson {

/// Ornstein-Uhlenbeck kernel data: start x0 at time t0 relaxing with rate
/// omega towards N(0, sigma0^2).
struct OUKernelParams {
  double omega = 1.0;
  double sigma0_sq = 0.5;
  double x0 = 0.0;
  double t0 = 0.0;

  static OUKernelParams from(const OscillatorParams& p, double x0, double t0 = 0.0);

  // alpha = x0 exp(-omega (t - t0))
  double alpha(double t) const;
  // sigma^2 = sigma0^2 (1 - exp(-2 omega (t - t0))), via expm1
  double variance(double t) const;
};

struct MixtureWeights {
  double beta_sq = 0.0;   // 1 - exp(-2 omega t)
  double gamma_sq = 1.0;  // exp(-2 omega t)
  double b_sq = 0.0;      // beta^2 / gamma^2 = exp(2 omega t) - 1

  static MixtureWeights at(double omega, double t);
};

// Theta(x) with Theta(0) = 1/2.
double heaviside(double x);

/// Gaussian transition density with mean alpha(t) and variance sigma^2(t).
/// Throws DomainError for t <= t0.
double ou_kernel(double x, double t, const OUKernelParams& k);

/// Transition density of the first excited drift,
/// Theta(x x0) (x/alpha) [G(x - alpha) - G(x + alpha)] / (sigma sqrt(2 pi)),
/// evaluated as (2x^2/sigma^2) f(z) G(x - alpha) / (sigma sqrt(2 pi)) with
/// z = x alpha / sigma^2 and f(z) = -expm1(-2z) / (2z), which stays accurate
/// when the two Gaussians nearly cancel. Throws DomainError for x0 = 0 or
/// t <= t0.
double excited_kernel(double x, double t, const OUKernelParams& k);

/// Long-time law Gamma(eps; x) rho_1(x) for an initial mass eps/2 on x > 0.
/// Throws DomainError unless 0 <= eps <= 2.
double excited_asymptote(double eps, double x, const OscillatorParams& p);

/// beta^2(t) rho_0(x) + gamma^2(t) rho_1(x). Throws DomainError for t < 0.
double decay_mixture(double x, double t, const OscillatorParams& p);

// Kernels in the p(x, t | y, t0) form consumed by propagate().
TransitionKernel ou_transition(double omega, double sigma0_sq);
TransitionKernel excited_transition(double omega, double sigma0_sq);

}  // namespace nelson
