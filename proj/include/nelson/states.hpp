#pragma once

#include <span>
#include <vector>

namespace nelson {

/// Physical constants of a harmonic oscillator V(x) = m w^2 x^2 / 2.
///
/// The default (m = hbar = omega = 1) gives D = 1/2 and sigma0^2 = 1/2.
/// The figure convention sigma0 = omega = 1 (D = 1) is reached through
/// from_width().
struct OscillatorParams {
  double mass = 1.0;
  double hbar = 1.0;
  double omega = 1.0;

  static OscillatorParams from_width(double sigma0, double omega, double mass = 1.0);

  double diffusion() const { return hbar / (2.0 * mass); }
  double sigma0_sq() const { return hbar / (2.0 * mass * omega); }
  double sigma0() const;
  double potential(double x) const { return 0.5 * mass * omega * omega * x * x; }

  // Throws DomainError unless all constants are finite and positive.
  void validate() const;
};

inline constexpr int kMaxOscillatorLevel = 20;

/// Oscillator eigenstate phi_n with its density, nodes and forward drift
/// v = 2D phi'/phi. Immutable once built.
class StationaryState {
 public:
  StationaryState(int level, const OscillatorParams& params);

  int level() const { return level_; }
  const OscillatorParams& params() const { return params_; }
  double energy() const;
  std::span<const double> nodes() const { return nodes_; }

  double amplitude(double x) const;
  double amplitude_derivative(double x) const;
  double amplitude_second_derivative(double x) const;
  double density(double x) const;

  // phi'/phi and phi''/phi written through Hermite ratios, so they stay finite
  // far in the tails where phi itself underflows. Both are singular at nodes.
  double log_derivative(double x) const;
  double curvature_ratio(double x) const;

  // Forward drift and its x-derivative; throw SingularityError within the
  // node guard.
  double drift(double x) const;
  double drift_derivative(double x) const;

  // ln|phi(x)|, -inf at nodes.
  double log_abs_amplitude(double x) const;

  void check_node_distance(double x) const;

 private:
  double scaled(double x) const;  // x / (sigma0 sqrt 2)

  int level_;
  OscillatorParams params_;
  double sigma0_;
  double log_prefactor_;
  std::vector<double> nodes_;
};

StationaryState oscillator_eigenstate(int level, const OscillatorParams& params);

/// 2D phi_n'(x)/phi_n(x). Throws SingularityError (naming the node) when x is
/// within 1e-13 sigma0 of a node.
double stationary_drift(const StationaryState& state, double x);

/// Gaussian snapshot N(mean, variance) with linear drift offset + slope * x
/// and quantum phase S = (m/2) [curvature x^2 - 2 tilt x + offset].
struct GaussianPacket {
  double mean = 0.0;
  double variance = 1.0;
  double phase_curvature = 0.0;
  double phase_tilt = 0.0;
  double phase_offset = 0.0;
  double drift_offset = 0.0;
  double drift_slope = 0.0;
  OscillatorParams params;

  double density(double x) const;
  double drift(double x) const { return drift_offset + drift_slope * x; }
  double phase(double x) const;
};

/// Coherent packet of displacement a at time t: density rho_0(x - a cos wt),
/// drift a w (cos wt - sin wt) - w x.
GaussianPacket coherent_state(double a, double t, const OscillatorParams& params);

}  // namespace nelson
