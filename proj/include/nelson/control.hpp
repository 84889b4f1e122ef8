#pragma once

#include <functional>
#include <span>

#include "nelson/states.hpp"

namespace nelson {

using Field = std::function<double(double x, double t)>;
using TimeFunction = std::function<double(double t)>;

/// A density/drift evolution together with the gauge theta(t), the raw
/// material for the phase S and the controlling potential V_c.
///
/// rho~ = length_scale * rho. Optional members carry analytic partials; when
/// empty, 4th-order central differences with steps 1e-4 * length_scale
/// (space) and 1e-4 * time_scale (time) are used.
struct FlowPair {
  double mass = 1.0;
  double hbar = 1.0;
  double length_scale = 1.0;
  double time_scale = 1.0;

  Field density;
  Field drift;
  Field drift_potential;  // W with drift = d_x W
  TimeFunction theta;

  Field dx_log_density;
  Field dxx_log_density;
  Field dt_log_density;
  Field dt_potential;
  TimeFunction theta_dot;

  double diffusion() const { return hbar / (2.0 * mass); }
};

/// S = m W - (hbar/2) ln rho~ - theta. Throws DomainError where rho <= 0.
double synthesize_phase(const FlowPair& pair, double x, double t);

/// V_c = (hbar^2/4m) d_xx ln rho~ + (hbar/2)(d_t ln rho~ + v d_x ln rho~)
///       - m v^2 / 2 - m d_t W + theta'.
/// Throws SingularityError where rho <= 0.
double synthesize_potential(const FlowPair& pair, double x, double t);

/// Same flow with theta replaced by theta + delta.
FlowPair with_gauge(FlowPair pair, TimeFunction delta, TimeFunction delta_dot);

// Library flows. All use rho~ = sigma0 rho and analytic partials.

/// Stationary state n with theta = E_n t.
FlowPair stationary_flow(int level, const OscillatorParams& p);
/// OU relaxation from x0 (t > 0), theta = (hbar/2) ln sinh(omega t).
FlowPair ou_relaxation_flow(const OscillatorParams& p, double x0);
/// First-excited relaxation from x0 != 0 (t > 0), on the semiaxis of x0, with
/// theta = (hbar/2)[2 ln(e^{2wt} - 1) + (x0/sigma0)^2 / (e^{2wt} - 1) - wt].
FlowPair excited_relaxation_flow(const OscillatorParams& p, double x0);
/// Decay mixture beta^2 rho_0 + gamma^2 rho_1 under v = -omega x,
/// theta = hbar omega t / 2 + (hbar/4) ln(2 pi).
FlowPair decay_flow(const OscillatorParams& p);

/// Closed-form controlling potentials of the library flows.
double ou_relaxation_potential(double x, double t, const OscillatorParams& p, double x0);
/// Valid for x != 0 on either semiaxis.
double excited_relaxation_potential(double x, double t, const OscillatorParams& p, double x0);
/// m w^2 x^2 / 2 - 2 hbar w U(x / sigma0; beta / gamma) with
/// U(x; b) = (x^4 + b^2 x^2 - b^2) / (b^2 + x^2)^2. Throws DomainError for
/// t <= 0 and SingularityError at x = 0 when b underflows.
double decay_potential(double x, double t, const OscillatorParams& p);
double decay_shape(double x, double b_sq);

// x / tanh x, with T(0) = 1.
double t_function(double x);

/// F(t) = 1 - (1 - e^{-rate t})^N = sum_k (-1)^{k+1} C(N,k) e^{-k rate t},
/// rate = ln N / tau. Throws DomainError for N < 2 or tau <= 0.
class SmoothSwitch {
 public:
  SmoothSwitch(int n, double tau);

  int order() const { return n_; }
  double tau() const { return tau_; }
  double switch_rate() const { return rate_; }
  double value(double t) const;
  double derivative(double t) const;
  // (-1)^{k+1} C(N, k) and omega_k = k * rate for 1 <= k <= N.
  double coefficient(int k) const;
  double omega_k(int k) const { return k * rate_; }

 private:
  int n_;
  double tau_;
  double rate_;
};

double smooth_switch(double t, int n, double tau);

struct CoherentTransition {
  double displacement = 1.0;  // a
  int order = 2;              // N
  double tau = 1.0;
  OscillatorParams params;

  SmoothSwitch switch_fn() const { return SmoothSwitch(order, tau); }
  // A(t) = a w (cos wt - sin wt) F(t)
  double drive(double t) const;
  double drive_rate(double t) const;
  // Mean of rho_0(x - mu): solves mu' = A - w mu with mu(0) = a.
  double mean(double t) const;
  double mean_rate(double t) const { return drive(t) - params.omega * mean(t); }

  // U_k(t) and W_k of the closed form; W_k = sqrt(2) U_k(pi / 4w).
  double u_coefficient(int k, double t) const;
  double w_coefficient(int k) const;
};

/// V_c = m w^2 x^2/2 - m w a x [sum_k c_k (U_k w_k e^{-w_k t} - W_k w e^{-wt}) + 2 w e^{-wt}].
/// The last term is the response to the initial displacement mu(0) = a; it
/// makes V_c(x, 0) = m w^2 x^2 / 2.
double coherent_transition_potential(double x, double t, const CoherentTransition& spec);

/// Flow rho_0(x - mu(t)), v = A(t) - w x, with
/// theta' = hbar w / 2 - m w^2 mu^2 + m A^2 / 2 (no x-independent term in V_c).
FlowPair coherent_transition_flow(const CoherentTransition& spec);

/// Gaussian N(mu, nu) trajectory with gauge theta. Derivatives left empty
/// are taken by 4th-order central differences with step time_scale / 1000.
struct GaussianHistory {
  TimeFunction mu, mu_dot, mu_ddot;
  TimeFunction nu, nu_dot, nu_ddot;
  TimeFunction theta, theta_dot;
  bool centered = false;  // mu identically zero
  double time_scale = 1.0;
};

/// Phase S = (m/2)[Omega x^2 - 2 U x + Delta] and potential
/// V_c = (m/2)[omega^2 x^2 - 2 a x + c] of a Gaussian flow with linear drift.
struct ControlSchedule {
  double t = 0.0;
  double phase_curvature = 0.0;  // Omega
  double phase_tilt = 0.0;       // U
  double phase_offset = 0.0;     // Delta
  double omega_sq = 0.0;
  double a = 0.0;
  double c = 0.0;

  double phase(double x, double mass) const {
    return 0.5 * mass * (phase_curvature * x * x - 2.0 * phase_tilt * x + phase_offset);
  }
  double potential(double x, double mass) const {
    return 0.5 * mass * (omega_sq * x * x - 2.0 * a * x + c);
  }
};

/// Throws DomainError when nu(t) <= 0.
ControlSchedule gaussian_schedule(const GaussianHistory& h, double diffusion, double mass,
                                  double sigma0, double t);

struct SqueezeSpec {
  double sigma0 = 1.0;
  double b = 2.0;  // sigma1 / sigma0
  double tau = 1.0;
  double diffusion = 1.0;
  double mass = 1.0;

  double sigma1() const { return b * sigma0; }
  void validate() const;
  // nu = sigma0^2 ((b + e^{-t/tau}) / (1 + e^{-t/tau}))^2
  double nu(double t) const;
  double nu_dot(double t) const;
  double nu_ddot(double t) const;
  // theta = (m D / 2) ln(2 pi nu / sigma0^2) + m D^2 t / nu
  double theta(double t) const;
  double theta_dot(double t) const;
  GaussianHistory history() const;
};

/// Closed-form schedule of the squeeze; U = a = 0.
ControlSchedule squeeze_schedule(const SqueezeSpec& spec, double t);

/// Flow N(0, nu(t)) with drift B(t) x, B = (nu' - 2D) / (2 nu).
FlowPair squeeze_flow(const SqueezeSpec& spec);

/// Amplitude R, phase S and potential V to be tested against
/// d_t S + (d_x S)^2 / 2m + V - 2 m D^2 R'' / R = 0. Derivatives are numeric
/// (4th-order, steps 1e-4 of the natural scales); R''/R is taken through
/// ln R, which stays well conditioned in the tails.
struct MadelungFields {
  double mass = 1.0;
  double hbar = 1.0;
  double length_scale = 1.0;
  double time_scale = 1.0;
  Field amplitude;
  Field phase;
  Field potential;
};

MadelungFields madelung_fields(const FlowPair& pair, Field potential);

/// Sup norm of the residual over the tensor sample xs x ts.
double madelung_residual(const MadelungFields& f, std::span<const double> xs,
                         std::span<const double> ts);

}  // namespace nelson
