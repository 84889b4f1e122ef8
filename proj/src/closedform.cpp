#include "nelson/closedform.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nelson/errors.hpp"

namespace nelson {

namespace {

double gaussian(double d, double var) {
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

void require_later(double t, double t0, const char* who) {
  if (!(t > t0)) throw DomainError(std::string(who) + ": need t > t0");
}

}  // namespace

OUKernelParams OUKernelParams::from(const OscillatorParams& p, double x0, double t0) {
  p.validate();
  return {p.omega, p.sigma0_sq(), x0, t0};
}

double OUKernelParams::alpha(double t) const { return x0 * std::exp(-omega * (t - t0)); }

double OUKernelParams::variance(double t) const {
  return -sigma0_sq * std::expm1(-2.0 * omega * (t - t0));
}

MixtureWeights MixtureWeights::at(double omega, double t) {
  MixtureWeights w;
  w.gamma_sq = std::exp(-2.0 * omega * t);
  w.beta_sq = -std::expm1(-2.0 * omega * t);
  w.b_sq = std::expm1(2.0 * omega * t);
  return w;
}

double heaviside(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return 0.0;
  return 0.5;
}

double ou_kernel(double x, double t, const OUKernelParams& k) {
  require_later(t, k.t0, "ou_kernel");
  return gaussian(x - k.alpha(t), k.variance(t));
}

double excited_kernel(double x, double t, const OUKernelParams& k) {
  if (k.x0 == 0.0) throw DomainError("excited_kernel: start on the node x0 = 0");
  require_later(t, k.t0, "excited_kernel");
  if (!(x * k.x0 > 0.0)) return 0.0;
  const double a = k.alpha(t);
  const double var = k.variance(t);
  const double z = x * a / var;
  const double f = z < 1e-300 ? 1.0 : -std::expm1(-2.0 * z) / (2.0 * z);
  return 2.0 * x * x / var * f * gaussian(x - a, var);
}

double excited_asymptote(double eps, double x, const OscillatorParams& p) {
  if (!(eps >= 0.0 && eps <= 2.0)) throw DomainError("excited_asymptote: eps must lie in [0, 2]");
  const double weight = eps * heaviside(x) + (2.0 - eps) * heaviside(-x);
  return weight * StationaryState(1, p).density(x);
}

double decay_mixture(double x, double t, const OscillatorParams& p) {
  if (!(t >= 0.0)) throw DomainError("decay_mixture: need t >= 0");
  const auto w = MixtureWeights::at(p.omega, t);
  const double s2 = p.sigma0_sq();
  const double rho0 = gaussian(x, s2);
  return w.beta_sq * rho0 + w.gamma_sq * rho0 * x * x / s2;
}

TransitionKernel ou_transition(double omega, double sigma0_sq) {
  return [omega, sigma0_sq](double x, double t, double y, double t0) {
    return ou_kernel(x, t, OUKernelParams{omega, sigma0_sq, y, t0});
  };
}

TransitionKernel excited_transition(double omega, double sigma0_sq) {
  return [omega, sigma0_sq](double x, double t, double y, double t0) {
    return excited_kernel(x, t, OUKernelParams{omega, sigma0_sq, y, t0});
  };
}

}  // namespace nelson
