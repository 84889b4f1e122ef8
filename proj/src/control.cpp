#include "nelson/control.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "nelson/closedform.hpp"
#include "nelson/errors.hpp"

namespace nelson {

namespace {

constexpr double kRelStep = 1e-4;

template <class F>
double d1(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

template <class F>
double d2(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

// z / sinh z, with the series near zero.
double q_function(double z) {
  if (std::abs(z) < 1e-4) return 1.0 - z * z / 6.0;
  return z / std::sinh(z);
}

// ln sinh y for y > 0 without overflow.
double log_sinh(double y) { return y + std::log1p(-std::exp(-2.0 * y)) - std::numbers::ln2; }

double log_density_tilde(const FlowPair& p, double x, double t) {
  return std::log(p.length_scale * p.density(x, t));
}

// Logistic L = 1 / (1 + e^{-s}) and its complement, both without cancellation.
std::pair<double, double> logistic(double s) {
  if (s >= 0.0) {
    const double e = std::exp(-s);
    return {1.0 / (1.0 + e), e / (1.0 + e)};
  }
  const double r = std::exp(s);
  return {r / (1.0 + r), 1.0 / (1.0 + r)};
}

}  // namespace

double synthesize_phase(const FlowPair& pair, double x, double t) {
  const double rho = pair.density(x, t);
  if (!(rho > 0.0)) {
    throw DomainError("synthesize_phase: density vanishes at x = " + std::to_string(x) +
                      ", t = " + std::to_string(t));
  }
  return pair.mass * pair.drift_potential(x, t) -
         0.5 * pair.hbar * std::log(pair.length_scale * rho) - pair.theta(t);
}

double synthesize_potential(const FlowPair& pair, double x, double t) {
  const double rho = pair.density(x, t);
  if (!(rho > 0.0)) {
    throw SingularityError("synthesize_potential: density vanishes at x = " + std::to_string(x) +
                               ", t = " + std::to_string(t),
                           x);
  }
  const double hx = kRelStep * pair.length_scale;
  const double ht = kRelStep * pair.time_scale;
  auto in_x = [&](double y) { return log_density_tilde(pair, y, t); };
  auto in_t = [&](double s) { return log_density_tilde(pair, x, s); };

  const double lx = pair.dx_log_density ? pair.dx_log_density(x, t) : d1(in_x, x, hx);
  const double lxx = pair.dxx_log_density ? pair.dxx_log_density(x, t) : d2(in_x, x, hx);
  const double lt = pair.dt_log_density ? pair.dt_log_density(x, t) : d1(in_t, t, ht);
  const double wt = pair.dt_potential
                        ? pair.dt_potential(x, t)
                        : d1([&](double s) { return pair.drift_potential(x, s); }, t, ht);
  const double thd = pair.theta_dot ? pair.theta_dot(t) : d1(pair.theta, t, ht);
  const double v = pair.drift(x, t);
  const double m = pair.mass;
  const double hb = pair.hbar;
  return hb * hb / (4.0 * m) * lxx + 0.5 * hb * (lt + v * lx) - 0.5 * m * v * v - m * wt + thd;
}

FlowPair with_gauge(FlowPair pair, TimeFunction delta, TimeFunction delta_dot) {
  auto theta = pair.theta;
  pair.theta = [theta, delta](double t) { return theta(t) + delta(t); };
  if (pair.theta_dot && delta_dot) {
    auto theta_dot = pair.theta_dot;
    pair.theta_dot = [theta_dot, delta_dot](double t) { return theta_dot(t) + delta_dot(t); };
  } else {
    pair.theta_dot = nullptr;
  }
  return pair;
}

FlowPair stationary_flow(int level, const OscillatorParams& p) {
  const StationaryState st(level, p);
  const double D = p.diffusion();
  const double s0 = p.sigma0();
  const double e = st.energy();
  FlowPair f;
  f.mass = p.mass;
  f.hbar = p.hbar;
  f.length_scale = s0;
  f.time_scale = 1.0 / p.omega;
  f.density = [st](double x, double) { return st.density(x); };
  f.drift = [st](double x, double) { return st.drift(x); };
  // W = D ln rho~, so the phase is -theta.
  f.drift_potential = [st, D, s0](double x, double) {
    return 2.0 * D * st.log_abs_amplitude(x) + D * std::log(s0);
  };
  f.theta = [e](double t) { return e * t; };
  f.theta_dot = [e](double) { return e; };
  f.dx_log_density = [st](double x, double) { return 2.0 * st.log_derivative(x); };
  f.dxx_log_density = [st](double x, double) {
    const double l = st.log_derivative(x);
    return 2.0 * (st.curvature_ratio(x) - l * l);
  };
  f.dt_log_density = [](double, double) { return 0.0; };
  f.dt_potential = [](double, double) { return 0.0; };
  return f;
}

FlowPair ou_relaxation_flow(const OscillatorParams& p, double x0) {
  const auto k = OUKernelParams::from(p, x0);
  const double w = p.omega;
  const double s0sq = k.sigma0_sq;
  const double hb = p.hbar;
  FlowPair f;
  f.mass = p.mass;
  f.hbar = hb;
  f.length_scale = p.sigma0();
  f.time_scale = 1.0 / w;
  f.density = [k](double x, double t) { return ou_kernel(x, t, k); };
  f.drift = [w](double x, double) { return -w * x; };
  f.drift_potential = [w](double x, double) { return -0.5 * w * x * x; };
  f.theta = [hb, w](double t) { return 0.5 * hb * log_sinh(w * t); };
  f.theta_dot = [hb, w](double t) { return 0.5 * hb * w / std::tanh(w * t); };
  f.dx_log_density = [k](double x, double t) { return -(x - k.alpha(t)) / k.variance(t); };
  f.dxx_log_density = [k](double, double t) { return -1.0 / k.variance(t); };
  f.dt_log_density = [k, w, s0sq](double x, double t) {
    const double a = k.alpha(t);
    const double s = k.variance(t);
    const double s_dot = 2.0 * w * (s0sq - s);
    const double d = x - a;
    return -d * w * a / s + d * d * s_dot / (2.0 * s * s) - s_dot / (2.0 * s);
  };
  f.dt_potential = [](double, double) { return 0.0; };
  return f;
}

double ou_relaxation_potential(double x, double t, const OscillatorParams& p, double x0) {
  const auto k = OUKernelParams::from(p, x0);
  if (!(t > 0.0)) throw DomainError("ou_relaxation_potential: need t > 0");
  const double s = k.variance(t);
  const double d = x - k.alpha(t);
  return 0.5 * p.hbar * p.omega * d * d / s * k.sigma0_sq / s - 0.5 * p.mass * p.omega * p.omega * x * x;
}

FlowPair excited_relaxation_flow(const OscillatorParams& p, double x0) {
  if (x0 == 0.0) throw DomainError("excited_relaxation_flow: start on the node x0 = 0");
  const auto k = OUKernelParams::from(p, x0);
  const double w = p.omega;
  const double s0sq = k.sigma0_sq;
  const double hb = p.hbar;
  const double D = p.diffusion();
  FlowPair f;
  f.mass = p.mass;
  f.hbar = hb;
  f.length_scale = p.sigma0();
  f.time_scale = 1.0 / w;
  f.density = [k](double x, double t) { return excited_kernel(x, t, k); };
  f.drift = [w, D](double x, double) { return 2.0 * D / x - w * x; };
  f.drift_potential = [w, D](double x, double) {
    return 2.0 * D * std::log(std::abs(x)) - 0.5 * w * x * x;
  };
  const double r0 = x0 * x0 / s0sq;
  f.theta = [hb, w, r0](double t) {
    const double em = std::expm1(2.0 * w * t);
    return 0.5 * hb * (2.0 * std::log(em) + r0 / em - w * t);
  };
  f.theta_dot = [hb, w, k, s0sq](double t) {
    const double s = k.variance(t);
    const double a = k.alpha(t);
    return 0.5 * hb * w * (4.0 * s0sq / s - 2.0 * s0sq * a * a / (s * s) - 1.0);
  };
  f.dx_log_density = [k](double x, double t) {
    const double s = k.variance(t);
    return 1.0 / x - x / s + t_function(x * k.alpha(t) / s) / x;
  };
  f.dxx_log_density = [k](double x, double t) {
    const double s = k.variance(t);
    const double q = q_function(x * k.alpha(t) / s);
    return -1.0 / (x * x) - 1.0 / s - q * q / (x * x);
  };
  f.dt_log_density = [k, w, s0sq](double x, double t) {
    const double s = k.variance(t);
    const double a = k.alpha(t);
    const double s_dot = 2.0 * w * (s0sq - s);
    const double tz = t_function(x * a / s);
    return w + w * a * a / s + (x * x + a * a) * s_dot / (2.0 * s * s) - tz * (w + s_dot / s) -
           s_dot / (2.0 * s);
  };
  f.dt_potential = [](double, double) { return 0.0; };
  return f;
}

double excited_relaxation_potential(double x, double t, const OscillatorParams& p, double x0) {
  if (x == 0.0) throw SingularityError("excited_relaxation_potential: x = 0 is a node", 0.0, 0);
  if (!(t > 0.0)) throw DomainError("excited_relaxation_potential: need t > 0");
  const auto k = OUKernelParams::from(p, x0);
  const double s = k.variance(t);
  const double a = k.alpha(t);
  const double s0sq = k.sigma0_sq;
  const double z = x * a / s;
  const double tz = t_function(z);
  const double q = q_function(z);
  const double m = p.mass, hb = p.hbar, w = p.omega;
  return 0.5 * m * w * w * x * x * (2.0 * s0sq * s0sq / (s * s) - 1.0) +
         hb * w * (1.0 - s0sq / s * tz) - 0.5 * hb * w * s0sq * a * a / (s * s) -
         hb * hb / (4.0 * m * x * x) * (1.0 + q * q - 2.0 * tz);
}

FlowPair decay_flow(const OscillatorParams& p) {
  p.validate();
  const double w = p.omega;
  const double s0sq = p.sigma0_sq();
  const double hb = p.hbar;
  FlowPair f;
  f.mass = p.mass;
  f.hbar = hb;
  f.length_scale = p.sigma0();
  f.time_scale = 1.0 / w;
  f.density = [p](double x, double t) { return decay_mixture(x, t, p); };
  f.drift = [w](double x, double) { return -w * x; };
  f.drift_potential = [w](double x, double) { return -0.5 * w * x * x; };
  f.theta = [hb, w](double t) {
    return 0.5 * hb * w * t + 0.25 * hb * std::log(2.0 * std::numbers::pi);
  };
  f.theta_dot = [hb, w](double) { return 0.5 * hb * w; };
  auto poly = [w, s0sq](double x, double t) {
    const auto mw = MixtureWeights::at(w, t);
    return std::pair{mw, mw.beta_sq + mw.gamma_sq * x * x / s0sq};
  };
  f.dx_log_density = [poly, s0sq](double x, double t) {
    const auto [mw, P] = poly(x, t);
    return -x / s0sq + 2.0 * mw.gamma_sq * x / (s0sq * P);
  };
  f.dxx_log_density = [poly, s0sq](double x, double t) {
    const auto [mw, P] = poly(x, t);
    const double g = mw.gamma_sq;
    return -1.0 / s0sq + 2.0 * g / (s0sq * P) - 4.0 * g * g * x * x / (s0sq * s0sq * P * P);
  };
  f.dt_log_density = [poly, s0sq, w](double x, double t) {
    const auto [mw, P] = poly(x, t);
    return 2.0 * w * mw.gamma_sq * (1.0 - x * x / s0sq) / P;
  };
  f.dt_potential = [](double, double) { return 0.0; };
  return f;
}

double decay_shape(double x, double b_sq) {
  const double den = b_sq + x * x;
  if (den == 0.0) throw SingularityError("decay_shape: singular at x = 0, b = 0", 0.0, 0);
  return (x * x * x * x + b_sq * x * x - b_sq) / (den * den);
}

double decay_potential(double x, double t, const OscillatorParams& p) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("decay_potential: need t > 0");
  const double b_sq = std::expm1(2.0 * p.omega * t);
  return 0.5 * p.mass * p.omega * p.omega * x * x -
         2.0 * p.hbar * p.omega * decay_shape(x / p.sigma0(), b_sq);
}

double t_function(double x) {
  if (std::abs(x) < 1e-4) return 1.0 + x * x / 3.0;
  return x / std::tanh(x);
}

SmoothSwitch::SmoothSwitch(int n, double tau) : n_(n), tau_(tau) {
  if (n < 2) throw DomainError("smooth_switch: N must be at least 2");
  if (!(tau > 0.0)) throw DomainError("smooth_switch: tau must be positive");
  rate_ = std::log(static_cast<double>(n)) / tau;
}

double SmoothSwitch::value(double t) const {
  return 1.0 - std::pow(-std::expm1(-rate_ * t), n_);
}

double SmoothSwitch::derivative(double t) const {
  const double e = std::exp(-rate_ * t);
  return -n_ * std::pow(-std::expm1(-rate_ * t), n_ - 1) * rate_ * e;
}

double SmoothSwitch::coefficient(int k) const {
  if (k < 1 || k > n_) throw DomainError("smooth_switch: coefficient index out of range");
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n_ - k + j) / j;
  return (k % 2 == 1) ? c : -c;
}

double smooth_switch(double t, int n, double tau) { return SmoothSwitch(n, tau).value(t); }

double CoherentTransition::drive(double t) const {
  const double w = params.omega;
  return displacement * w * (std::cos(w * t) - std::sin(w * t)) * switch_fn().value(t);
}

double CoherentTransition::drive_rate(double t) const {
  const double w = params.omega;
  const auto sw = switch_fn();
  const double c = std::cos(w * t), s = std::sin(w * t);
  return displacement * w * (-w * (s + c) * sw.value(t) + (c - s) * sw.derivative(t));
}

double CoherentTransition::mean(double t) const {
  const double w = params.omega;
  const auto sw = switch_fn();
  const double c = std::cos(w * t), s = std::sin(w * t);
  const double ew = std::exp(-w * t);
  double sum = 0.0;
  for (int k = 1; k <= order; ++k) {
    const double wk = sw.omega_k(k);
    const double den = (w - wk) * (w - wk) + w * w;
    sum += sw.coefficient(k) *
           (std::exp(-wk * t) * ((2.0 * w - wk) * c + wk * s) - (2.0 * w - wk) * ew) / den;
  }
  return displacement * (ew + w * sum);
}

double CoherentTransition::u_coefficient(int k, double t) const {
  const double w = params.omega;
  const double wk = switch_fn().omega_k(k);
  const double den = (wk - w) * (wk - w) + w * w;
  return std::sin(w * t) + (2.0 * w * w * std::sin(w * t) - wk * wk * std::cos(w * t)) / den;
}

double CoherentTransition::w_coefficient(int k) const {
  const double w = params.omega;
  const double wk = switch_fn().omega_k(k);
  const double den = (wk - w) * (wk - w) + w * w;
  return 1.0 + (2.0 * w * w - wk * wk) / den;
}

double coherent_transition_potential(double x, double t, const CoherentTransition& spec) {
  const auto sw = spec.switch_fn();
  const double w = spec.params.omega;
  const double m = spec.params.mass;
  const double ew = std::exp(-w * t);
  double sum = 0.0;
  for (int k = 1; k <= spec.order; ++k) {
    const double wk = sw.omega_k(k);
    sum += sw.coefficient(k) *
           (spec.u_coefficient(k, t) * wk * std::exp(-wk * t) - spec.w_coefficient(k) * w * ew);
  }
  sum += 2.0 * w * ew;
  return 0.5 * m * w * w * x * x - m * w * spec.displacement * x * sum;
}

FlowPair coherent_transition_flow(const CoherentTransition& spec) {
  spec.params.validate();
  (void)spec.switch_fn();
  const double w = spec.params.omega;
  const double m = spec.params.mass;
  const double hb = spec.params.hbar;
  const double s0sq = spec.params.sigma0_sq();
  FlowPair f;
  f.mass = m;
  f.hbar = hb;
  f.length_scale = spec.params.sigma0();
  f.time_scale = 1.0 / w;
  f.density = [spec, s0sq](double x, double t) {
    const double d = x - spec.mean(t);
    return std::exp(-d * d / (2.0 * s0sq)) / std::sqrt(2.0 * std::numbers::pi * s0sq);
  };
  f.drift = [spec, w](double x, double t) { return spec.drive(t) - w * x; };
  f.drift_potential = [spec, w](double x, double t) {
    return spec.drive(t) * x - 0.5 * w * x * x;
  };
  f.dt_potential = [spec](double x, double t) { return spec.drive_rate(t) * x; };
  auto theta_dot = [spec, hb, w, m](double t) {
    const double mu = spec.mean(t);
    const double a = spec.drive(t);
    return 0.5 * hb * w - m * w * w * mu * mu + 0.5 * m * a * a;
  };
  f.theta_dot = theta_dot;
  // Fixed panels keep theta an analytic function of t, so finite differences
  // of the phase see no quadrature noise.
  f.theta = [theta_dot](double t) {
    constexpr int kPanels = 64;
    const double h = t / kPanels;
    double s = 0.0;
    for (int i = 0; i < kPanels; ++i)
      s += boost::math::quadrature::gauss<double, 20>::integrate(theta_dot, i * h, (i + 1) * h);
    return s;
  };
  f.dx_log_density = [spec, s0sq](double x, double t) { return -(x - spec.mean(t)) / s0sq; };
  f.dxx_log_density = [s0sq](double, double) { return -1.0 / s0sq; };
  f.dt_log_density = [spec, s0sq](double x, double t) {
    return (x - spec.mean(t)) * spec.mean_rate(t) / s0sq;
  };
  return f;
}

ControlSchedule gaussian_schedule(const GaussianHistory& h, double diffusion, double mass,
                                  double sigma0, double t) {
  const double step = h.time_scale / 1000.0;
  auto eval = [t](const TimeFunction& f) { return f(t); };
  auto deriv = [t, step](const TimeFunction& given, const TimeFunction& base) {
    return given ? given(t) : d1(base, t, step);
  };
  auto second = [t, step](const TimeFunction& given, const TimeFunction& first,
                          const TimeFunction& base) {
    if (given) return given(t);
    if (first) return d1(first, t, step);
    return d2(base, t, step);
  };

  const double nu = eval(h.nu);
  if (!(nu > 0.0)) throw DomainError("gaussian_schedule: variance must be positive, t = " + std::to_string(t));
  const double nu_d = deriv(h.nu_dot, h.nu);
  const double nu_dd = second(h.nu_ddot, h.nu_dot, h.nu);
  const double theta = eval(h.theta);
  const double theta_d = deriv(h.theta_dot, h.theta);
  double mu = 0.0, mu_d = 0.0, mu_dd = 0.0;
  if (!h.centered) {
    mu = eval(h.mu);
    mu_d = deriv(h.mu_dot, h.mu);
    mu_dd = second(h.mu_ddot, h.mu_dot, h.mu);
  }
  const double D = diffusion;

  ControlSchedule s;
  s.t = t;
  s.phase_curvature = nu_d / (2.0 * nu);
  s.phase_tilt = (mu * nu_d - 2.0 * nu * mu_d) / (2.0 * nu);
  s.phase_offset = D * mu * mu / nu + D * std::log(2.0 * std::numbers::pi * nu / (sigma0 * sigma0)) -
                   2.0 * theta / mass;
  s.omega_sq = (4.0 * D * D - 2.0 * nu * nu_dd + nu_d * nu_d) / (4.0 * nu * nu);
  s.a = mu_dd + mu * s.omega_sq;
  if (h.centered) {
    s.c = 2.0 * theta_d / mass - D * (nu_d + 2.0 * D) / nu;
  } else {
    const double g = 2.0 * nu * mu_d - mu * nu_d + 2.0 * D * mu;
    s.c = (8.0 * D * D * mu * mu - 4.0 * D * nu * nu_d - 8.0 * D * D * nu - g * g) / (4.0 * nu * nu) +
          2.0 * theta_d / mass;
  }
  return s;
}

void SqueezeSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(sigma0) || !positive(b) || !positive(tau) || !positive(diffusion) ||
      !positive(mass))
    throw DomainError("SqueezeSpec: sigma0, b, tau, D and m must be positive");
}

namespace {

// g = (b + e^{-t/tau}) / (1 + e^{-t/tau}) = 1 + (b - 1) L with L logistic in t/tau.
struct SqueezeTerms {
  double l, lc, g;
};

SqueezeTerms squeeze_terms(const SqueezeSpec& s, double t) {
  const auto [l, lc] = logistic(t / s.tau);
  return {l, lc, 1.0 + (s.b - 1.0) * l};
}

}  // namespace

double SqueezeSpec::nu(double t) const {
  const auto q = squeeze_terms(*this, t);
  return sigma0 * sigma0 * q.g * q.g;
}

double SqueezeSpec::nu_dot(double t) const {
  const auto q = squeeze_terms(*this, t);
  const double g_dot = (b - 1.0) * q.l * q.lc / tau;
  return 2.0 * sigma0 * sigma0 * q.g * g_dot;
}

double SqueezeSpec::nu_ddot(double t) const {
  const auto q = squeeze_terms(*this, t);
  const double g_dot = (b - 1.0) * q.l * q.lc / tau;
  const double g_ddot = (b - 1.0) * q.l * q.lc * (q.lc - q.l) / (tau * tau);
  return 2.0 * sigma0 * sigma0 * (g_dot * g_dot + q.g * g_ddot);
}

double SqueezeSpec::theta(double t) const {
  const double v = nu(t);
  const double D = diffusion;
  return 0.5 * mass * D * std::log(2.0 * std::numbers::pi * v / (sigma0 * sigma0)) +
         mass * D * D * t / v;
}

double SqueezeSpec::theta_dot(double t) const {
  const double v = nu(t);
  const double vd = nu_dot(t);
  const double D = diffusion;
  return 0.5 * mass * D * vd / v + mass * D * D / v - mass * D * D * t * vd / (v * v);
}

GaussianHistory SqueezeSpec::history() const {
  validate();
  const SqueezeSpec s = *this;
  GaussianHistory h;
  h.centered = true;
  h.time_scale = tau;
  h.nu = [s](double t) { return s.nu(t); };
  h.nu_dot = [s](double t) { return s.nu_dot(t); };
  h.nu_ddot = [s](double t) { return s.nu_ddot(t); };
  h.theta = [s](double t) { return s.theta(t); };
  h.theta_dot = [s](double t) { return s.theta_dot(t); };
  return h;
}

ControlSchedule squeeze_schedule(const SqueezeSpec& spec, double t) {
  spec.validate();
  const auto q = squeeze_terms(spec, t);
  const double D = spec.diffusion;
  const double s0sq = spec.sigma0 * spec.sigma0;
  const double bm1 = spec.b - 1.0;
  const double tau = spec.tau;
  ControlSchedule s;
  s.t = t;
  s.phase_curvature = bm1 / tau * q.lc * q.l / q.g;
  s.phase_offset = -2.0 * D * D * t / (s0sq * q.g * q.g);
  const double inv_g2 = 1.0 / (q.g * q.g);
  s.omega_sq = D * D / (s0sq * s0sq) * inv_g2 * inv_g2 +
               bm1 / (tau * tau) * q.lc * (q.l - q.lc) * q.l / q.g;
  s.c = -4.0 * D * D * bm1 / s0sq * q.lc * q.l / (q.g * q.g * q.g) * t / tau;
  return s;
}

FlowPair squeeze_flow(const SqueezeSpec& spec) {
  spec.validate();
  const SqueezeSpec s = spec;
  const double D = spec.diffusion;
  auto B = [s, D](double t) { return (s.nu_dot(t) - 2.0 * D) / (2.0 * s.nu(t)); };
  FlowPair f;
  f.mass = spec.mass;
  f.hbar = 2.0 * spec.mass * D;
  f.length_scale = spec.sigma0;
  f.time_scale = spec.tau;
  f.density = [s](double x, double t) {
    const double v = s.nu(t);
    return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * std::numbers::pi * v);
  };
  f.drift = [B](double x, double t) { return B(t) * x; };
  f.drift_potential = [B](double x, double t) { return 0.5 * B(t) * x * x; };
  f.dt_potential = [s, D](double x, double t) {
    const double v = s.nu(t), vd = s.nu_dot(t), vdd = s.nu_ddot(t);
    const double b_dot = vdd / (2.0 * v) - (vd - 2.0 * D) * vd / (2.0 * v * v);
    return 0.5 * b_dot * x * x;
  };
  f.theta = [s](double t) { return s.theta(t); };
  f.theta_dot = [s](double t) { return s.theta_dot(t); };
  f.dx_log_density = [s](double x, double t) { return -x / s.nu(t); };
  f.dxx_log_density = [s](double, double t) { return -1.0 / s.nu(t); };
  f.dt_log_density = [s](double x, double t) {
    const double v = s.nu(t), vd = s.nu_dot(t);
    return x * x * vd / (2.0 * v * v) - vd / (2.0 * v);
  };
  return f;
}

MadelungFields madelung_fields(const FlowPair& pair, Field potential) {
  MadelungFields m;
  m.mass = pair.mass;
  m.hbar = pair.hbar;
  m.length_scale = pair.length_scale;
  m.time_scale = pair.time_scale;
  m.amplitude = [pair](double x, double t) { return std::sqrt(pair.density(x, t)); };
  m.phase = [pair](double x, double t) { return synthesize_phase(pair, x, t); };
  m.potential = std::move(potential);
  return m;
}

double madelung_residual(const MadelungFields& f, std::span<const double> xs,
                         std::span<const double> ts) {
  const double hx = kRelStep * f.length_scale;
  const double ht = kRelStep * f.time_scale;
  const double D = f.hbar / (2.0 * f.mass);
  double worst = 0.0;
  for (double t : ts) {
    for (double x : xs) {
      auto s_x = [&](double y) { return f.phase(y, t); };
      auto s_t = [&](double s) { return f.phase(x, s); };
      auto log_r = [&](double y) { return std::log(f.amplitude(y, t)); };
      const double st = d1(s_t, t, ht);
      const double sx = d1(s_x, x, hx);
      const double l1 = d1(log_r, x, hx);
      const double l2 = d2(log_r, x, hx);
      const double res = st + sx * sx / (2.0 * f.mass) + f.potential(x, t) -
                         2.0 * f.mass * D * D * (l2 + l1 * l1);
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

}  // namespace nelson
