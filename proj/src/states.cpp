#include "nelson/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nelson/errors.hpp"
#include "nelson/specfun.hpp"

namespace nelson {

namespace {

constexpr double kNodeGuard = 1e-13;  // in units of sigma0
constexpr double kNodeTolerance = 1e-12;

// Positive roots of H_n(u), ascending. Hermite roots lie inside |u| < sqrt(2n+1)
// and are separated by more than 0.3 for n <= 20, so a 1e-3 scan cannot skip one.
std::vector<double> positive_hermite_roots(int n, double x_per_u) {
  std::vector<double> roots;
  const double u_max = std::sqrt(2.0 * n + 1.0) + 1.0;
  const double step = 1e-3;
  // Odd orders have the root u = 0 handled by the caller; start just off it.
  double u_prev = (n % 2 == 1) ? 0.5 * step : 0.0;
  double h_prev = hermite(n, u_prev);
  for (double u = u_prev + step; u <= u_max; u += step) {
    const double h = hermite(n, u);
    if (std::signbit(h) != std::signbit(h_prev)) {
      double lo = u_prev;
      double hi = u;
      double f_lo = h_prev;
      while ((hi - lo) * x_per_u > kNodeTolerance) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = hermite(n, mid);
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
          lo = mid;
          f_lo = f_mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    u_prev = u;
    h_prev = h;
  }
  return roots;
}

}  // namespace

OscillatorParams OscillatorParams::from_width(double sigma0, double omega, double mass) {
  OscillatorParams p;
  p.mass = mass;
  p.omega = omega;
  p.hbar = 2.0 * mass * omega * sigma0 * sigma0;
  p.validate();
  return p;
}

double OscillatorParams::sigma0() const { return std::sqrt(sigma0_sq()); }

void OscillatorParams::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(mass)) throw DomainError("OscillatorParams: mass must be positive");
  if (!positive(hbar)) throw DomainError("OscillatorParams: hbar must be positive");
  if (!positive(omega)) throw DomainError("OscillatorParams: omega must be positive");
}

StationaryState::StationaryState(int level, const OscillatorParams& params)
    : level_(level), params_(params) {
  if (level < 0 || level > kMaxOscillatorLevel) {
    throw DomainError("oscillator_eigenstate: level " + std::to_string(level) +
                      " outside [0, " + std::to_string(kMaxOscillatorLevel) + "]");
  }
  params_.validate();
  sigma0_ = params_.sigma0();
  log_prefactor_ = -0.5 * (std::log(sigma0_ * std::sqrt(2.0 * std::numbers::pi)) +
                           level * std::numbers::ln2 + std::lgamma(level + 1.0));

  const double x_per_u = sigma0_ * std::numbers::sqrt2;
  const auto positive = positive_hermite_roots(level, x_per_u);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) nodes_.push_back(-*it * x_per_u);
  if (level % 2 == 1) nodes_.push_back(0.0);
  for (double u : positive) nodes_.push_back(u * x_per_u);
}

double StationaryState::energy() const { return params_.hbar * params_.omega * (level_ + 0.5); }

double StationaryState::scaled(double x) const { return x / (sigma0_ * std::numbers::sqrt2); }

double StationaryState::amplitude(double x) const {
  return std::exp(log_prefactor_ - x * x / (4.0 * sigma0_ * sigma0_)) * hermite(level_, scaled(x));
}

double StationaryState::amplitude_derivative(double x) const {
  const double u = scaled(x);
  const double s2 = sigma0_ * sigma0_;
  const double g = std::exp(log_prefactor_ - x * x / (4.0 * s2));
  const double dh = level_ == 0 ? 0.0 : 2.0 * level_ * hermite(level_ - 1, u);
  return g * (-x / (2.0 * s2) * hermite(level_, u) + dh / (sigma0_ * std::numbers::sqrt2));
}

double StationaryState::amplitude_second_derivative(double x) const {
  const double u = scaled(x);
  const double s2 = sigma0_ * sigma0_;
  const double g = std::exp(log_prefactor_ - x * x / (4.0 * s2));
  const double du = 1.0 / (sigma0_ * std::numbers::sqrt2);
  const double h = hermite(level_, u);
  const double dh = level_ == 0 ? 0.0 : 2.0 * level_ * hermite(level_ - 1, u);
  const double d2h = level_ < 2 ? 0.0 : 4.0 * level_ * (level_ - 1) * hermite(level_ - 2, u);
  const double g1 = -x / (2.0 * s2);
  const double g2 = x * x / (4.0 * s2 * s2) - 1.0 / (2.0 * s2);
  return g * (g2 * h + 2.0 * g1 * dh * du + d2h * du * du);
}

double StationaryState::density(double x) const {
  const double a = amplitude(x);
  return a * a;
}

double StationaryState::log_derivative(double x) const {
  const double s2 = sigma0_ * sigma0_;
  double r = -x / (2.0 * s2);
  if (level_ > 0) {
    const double u = scaled(x);
    r += 2.0 * level_ * hermite(level_ - 1, u) / hermite(level_, u) /
         (sigma0_ * std::numbers::sqrt2);
  }
  return r;
}

double StationaryState::curvature_ratio(double x) const {
  const double s2 = sigma0_ * sigma0_;
  const double u = scaled(x);
  const double du = 1.0 / (sigma0_ * std::numbers::sqrt2);
  const double g1 = -x / (2.0 * s2);
  const double g2 = x * x / (4.0 * s2 * s2) - 1.0 / (2.0 * s2);
  if (level_ == 0) return g2;
  const double h = hermite(level_, u);
  const double dh_h = 2.0 * level_ * hermite(level_ - 1, u) / h;
  const double d2h_h = level_ < 2 ? 0.0 : 4.0 * level_ * (level_ - 1) * hermite(level_ - 2, u) / h;
  return g2 + 2.0 * g1 * dh_h * du + d2h_h * du * du;
}

void StationaryState::check_node_distance(double x) const {
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (std::abs(x - nodes_[k]) < kNodeGuard * sigma0_) {
      throw SingularityError("drift of level " + std::to_string(level_) +
                                 " is singular at node " + std::to_string(k) + " (x = " +
                                 std::to_string(nodes_[k]) + ")",
                             nodes_[k], static_cast<std::ptrdiff_t>(k));
    }
  }
}

double StationaryState::drift(double x) const {
  check_node_distance(x);
  return 2.0 * params_.diffusion() * log_derivative(x);
}

double StationaryState::drift_derivative(double x) const {
  check_node_distance(x);
  const double l = log_derivative(x);
  return 2.0 * params_.diffusion() * (curvature_ratio(x) - l * l);
}

double StationaryState::log_abs_amplitude(double x) const {
  const double h = hermite(level_, scaled(x));
  if (h == 0.0) return -std::numeric_limits<double>::infinity();
  return log_prefactor_ - x * x / (4.0 * sigma0_ * sigma0_) + std::log(std::abs(h));
}

StationaryState oscillator_eigenstate(int level, const OscillatorParams& params) {
  return StationaryState(level, params);
}

double stationary_drift(const StationaryState& state, double x) { return state.drift(x); }

double GaussianPacket::density(double x) const {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double GaussianPacket::phase(double x) const {
  return 0.5 * params.mass * (phase_curvature * x * x - 2.0 * phase_tilt * x + phase_offset);
}

GaussianPacket coherent_state(double a, double t, const OscillatorParams& params) {
  params.validate();
  const double w = params.omega;
  GaussianPacket g;
  g.params = params;
  g.mean = a * std::cos(w * t);
  g.variance = params.sigma0_sq();
  g.drift_offset = a * w * (std::cos(w * t) - std::sin(w * t));
  g.drift_slope = -w;
  // Phase of the displaced ground state, written in the quadratic form.
  g.phase_curvature = 0.0;
  g.phase_tilt = a * w * std::sin(w * t);
  g.phase_offset = 0.5 * a * a * w * std::sin(2.0 * w * t) - params.hbar * w * t / params.mass;
  return g;
}

}  // namespace nelson
