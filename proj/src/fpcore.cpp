#include "nelson/fpcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "nelson/errors.hpp"
#include "nelson/kernels.hpp"

namespace nelson {

namespace {

constexpr double kMassTolerance = 1e-6;
constexpr double kNegativityFloor = -1e-10;
constexpr double kOnGridTolerance = 1e-9;  // fraction of h

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGlNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

double integrate_drift(const DriftField& drift, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t k = 0; k < kGlNodes.size(); ++k) s += kGlWeights[k] * drift(mid + half * kGlNodes[k]);
  return s * half;
}

// Bernoulli function w / (e^w - 1).
double bernoulli(double w) {
  if (std::abs(w) < 1e-10) return 1.0 - 0.5 * w;
  return w / std::expm1(w);
}

std::vector<double> singular_points(const DriftField& drift, const Grid1D& grid) {
  if (drift.singularities) {
    std::vector<double> s;
    for (double x : *drift.singularities) {
      if (x >= grid.lo() - kOnGridTolerance * grid.spacing() &&
          x <= grid.hi() + kOnGridTolerance * grid.spacing())
        s.push_back(x);
    }
    std::sort(s.begin(), s.end());
    return s;
  }
  return split_domain(drift, grid).breakpoints;
}

bool on_point(double s, double x, double h) { return std::abs(s - x) <= kOnGridTolerance * h; }

// Barrier layout of the discrete operator: closed faces and grid points that
// sit on a singularity (held at zero).
struct Barriers {
  std::vector<char> face_closed;  // face f joins points f and f+1
  std::vector<char> pinned;
};

Barriers build_barriers(const Grid1D& grid, std::span<const double> singular) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  Barriers b{std::vector<char>(n - 1, 0), std::vector<char>(n, 0)};
  for (double s : singular) {
    const std::size_t j = grid.nearest(s);
    if (on_point(s, grid.x(j), h)) {
      b.pinned[j] = 1;
      if (j > 0) b.face_closed[j - 1] = 1;
      if (j + 1 < n) b.face_closed[j] = 1;
    } else {
      const std::size_t i = grid.x(j) < s ? j : j - 1;
      b.face_closed[i] = 1;
    }
  }
  return b;
}

struct FaceCoefficients {
  std::vector<double> plus;   // flux weight of the left point
  std::vector<double> minus;  // flux weight of the right point
};

void fill_faces(const DriftField& drift, double diffusion, const Grid1D& grid,
                const Barriers& barriers, double t, FaceCoefficients& fc) {
  const std::size_t nf = grid.size() - 1;
  const double h = grid.spacing();
  fc.plus.assign(nf, 0.0);
  fc.minus.assign(nf, 0.0);
  for (std::size_t f = 0; f < nf; ++f) {
    if (barriers.face_closed[f]) continue;
    const double xm = 0.5 * (grid.x(f) + grid.x(f + 1));
    // With a primitive the exponent is the exact potential step, so the
    // scheme holds exp(potential / D) as its discrete equilibrium.
    const double w = drift.potential && !drift.time_dependent
                         ? (drift.potential(grid.x(f + 1)) - drift.potential(grid.x(f))) / diffusion
                         : drift(xm, t) * h / diffusion;
    if (!std::isfinite(w)) {
      throw SingularityError("evolve_density: drift not finite at face x = " + std::to_string(xm),
                             xm);
    }
    fc.plus[f] = diffusion / h * bernoulli(-w);
    fc.minus[f] = diffusion / h * bernoulli(w);
  }
}

// Solves (V - theta dt F_new) x = (V + (1 - theta) dt F_old) rho in place.
void theta_step(const Grid1D& grid, const Barriers& barriers, const FaceCoefficients& f_old,
                const FaceCoefficients& f_new, double dt, double theta, std::vector<double>& rho,
                std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
                std::vector<double>& rhs) {
  const std::size_t n = grid.size();
  const double a_new = theta * dt;
  const double a_old = (1.0 - theta) * dt;
  for (std::size_t i = 0; i < n; ++i) {
    if (barriers.pinned[i]) {
      lower[i] = upper[i] = 0.0;
      diag[i] = 1.0;
      rhs[i] = 0.0;
      continue;
    }
    const double vol = grid.weight(i);
    double diag_new = 0.0, diag_old = 0.0, lo_new = 0.0, up_new = 0.0;
    double r = 0.0;
    if (i + 1 < n) {
      diag_new -= f_new.plus[i];
      diag_old -= f_old.plus[i];
      up_new = f_new.minus[i];
      r += f_old.minus[i] * rho[i + 1];
    }
    if (i > 0) {
      diag_new -= f_new.minus[i - 1];
      diag_old -= f_old.minus[i - 1];
      lo_new = f_new.plus[i - 1];
      r += f_old.plus[i - 1] * rho[i - 1];
    }
    lower[i] = -a_new * lo_new;
    upper[i] = -a_new * up_new;
    diag[i] = vol - a_new * diag_new;
    rhs[i] = vol * rho[i] + a_old * (diag_old * rho[i] + r);
  }
  // Thomas sweep; the matrix is a column-diagonally-dominant M-matrix.
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rho[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rho[i] = (rhs[i] - upper[i] * rho[i + 1]) / diag[i];
}

}  // namespace

SectorDecomposition split_domain(const DriftField& drift, const Grid1D& grid) {
  SectorDecomposition d;
  if (drift.singularities) {
    for (double s : *drift.singularities) {
      if (s > grid.lo() && s < grid.hi()) d.breakpoints.push_back(s);
    }
    std::sort(d.breakpoints.begin(), d.breakpoints.end());
  } else {
    // A guarded evaluation close to a node counts as 1/v = 0.
    auto inv = [&](double x) {
      try {
        return 1.0 / drift(x);
      } catch (const SingularityError&) {
        return 0.0;
      }
    };
    double x_prev = grid.x(0);
    double g_prev = inv(x_prev);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double x = grid.x(i);
      const double g = inv(x);
      if (g == 0.0) {
        if (x < grid.hi()) d.breakpoints.push_back(x);
      } else if (g_prev != 0.0 && std::signbit(g) != std::signbit(g_prev)) {
        double lo = x_prev, hi = x, g_lo = g_prev;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double gm = inv(mid);
          if (gm == 0.0) {
            lo = hi = mid;
            break;
          }
          if (std::signbit(gm) == std::signbit(g_lo)) {
            lo = mid;
            g_lo = gm;
          } else {
            hi = mid;
          }
        }
        const double root = 0.5 * (lo + hi);
        // A pole of v is a continuous zero crossing of 1/v; a zero of v makes
        // 1/v jump and grow in magnitude instead.
        const double g_root = std::abs(inv(root));
        if (g_root <= std::min(std::abs(g_prev), std::abs(g)) && root > grid.lo() &&
            root < grid.hi()) {
          d.breakpoints.push_back(root);
        }
      }
      x_prev = x;
      g_prev = g;
    }
  }
  double left = grid.lo();
  for (double b : d.breakpoints) {
    d.sectors.emplace_back(left, b);
    left = b;
  }
  d.sectors.emplace_back(left, grid.hi());
  return d;
}

GridDensity invariant_density(const DriftField& drift, double diffusion, const Grid1D& grid) {
  if (!(diffusion > 0.0)) throw DomainError("invariant_density: diffusion must be positive");
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const auto singular = singular_points(drift, grid);
  auto is_singular = [&](double x) {
    return std::any_of(singular.begin(), singular.end(),
                       [&](double s) { return on_point(s, x, h); });
  };

  std::vector<double> exponent(n, neg_inf);
  if (drift.potential) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid.x(i);
      if (!is_singular(x)) exponent[i] = drift.potential(x) / diffusion;
    }
  } else {
    const auto interior = std::count_if(singular.begin(), singular.end(), [&](double s) {
      return s > grid.lo() + kOnGridTolerance * h && s < grid.hi() - kOnGridTolerance * h;
    });
    if (interior > 0) {
      throw DomainError(
          "invariant_density: grid spans several sectors; a drift potential is required to fix "
          "their relative weights");
    }
    std::size_t anchor = n / 2;
    while (anchor < n && is_singular(grid.x(anchor))) ++anchor;
    if (anchor == n) throw DomainError("invariant_density: no regular grid point");
    exponent[anchor] = 0.0;
    for (std::size_t i = anchor + 1; i < n && !is_singular(grid.x(i)); ++i)
      exponent[i] = exponent[i - 1] + integrate_drift(drift, grid.x(i - 1), grid.x(i)) / diffusion;
    for (std::size_t i = anchor; i-- > 0 && !is_singular(grid.x(i));)
      exponent[i] = exponent[i + 1] - integrate_drift(drift, grid.x(i), grid.x(i + 1)) / diffusion;
  }

  double top = neg_inf;
  for (double e : exponent) {
    if (std::isnan(e) || e == std::numeric_limits<double>::infinity())
      throw DomainError("invariant_density: exponent not finite (divergent drift integral)");
    top = std::max(top, e);
  }
  if (!std::isfinite(top)) throw DomainError("invariant_density: density vanishes on the grid");
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = std::exp(exponent[i] - top);

  std::vector<double> breaks;
  for (double s : singular)
    if (s > grid.lo() && s < grid.hi()) breaks.push_back(s);
  GridDensity out(grid, std::move(values), std::move(breaks));
  const double norm = out.mass();
  if (!std::isfinite(norm) || !(norm > 0.0))
    throw DomainError("invariant_density: density is not normalizable on the grid");
  out.normalize();
  return out;
}

std::vector<GridDensity> evolve_density(const DriftField& drift, double diffusion,
                                        const GridDensity& rho0, std::span<const double> times,
                                        const EvolveOptions& options) {
  if (!(diffusion > 0.0)) throw DomainError("evolve_density: diffusion must be positive");
  const Grid1D& grid = rho0.grid;
  const double h = grid.spacing();
  const auto singular = singular_points(drift, grid);
  const Barriers barriers = build_barriers(grid, singular);

  std::vector<double> breaks;
  for (double s : singular)
    if (s > grid.lo() && s < grid.hi()) breaks.push_back(s);

  double peak = 0.0;
  for (double v : rho0.values) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (barriers.pinned[i] && std::abs(rho0.values[i]) > 1e-12 * peak) {
      throw DomainError("evolve_density: initial density is nonzero at node x = " +
                        std::to_string(grid.x(i)) +
                        "; mass on a node cannot be attributed to a sector");
    }
  }

  double dt_max = h * h / (2.0 * diffusion);
  if (options.rate_scale > 0.0) dt_max = std::min(dt_max, 0.05 / options.rate_scale);
  if (options.max_dt > 0.0) dt_max = std::min(dt_max, options.max_dt);

  std::vector<double> rho = rho0.values;
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (barriers.pinned[i]) rho[i] = 0.0;
  const GridDensity start(grid, rho, breaks);
  const std::vector<double> initial_masses = start.sector_masses;

  const std::size_t n = grid.size();
  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  FaceCoefficients f_old, f_new;
  fill_faces(drift, diffusion, grid, barriers, 0.0, f_old);
  f_new = f_old;

  auto check_positivity = [&](double t) {
    const auto it = std::min_element(rho.begin(), rho.end());
    if (*it < kNegativityFloor) {
      throw PositivityError("evolve_density: density " + std::to_string(*it) + " at x = " +
                            std::to_string(grid.x(static_cast<std::size_t>(it - rho.begin()))) +
                            ", t = " + std::to_string(t));
    }
  };

  std::vector<GridDensity> out;
  out.reserve(times.size());
  double t_now = 0.0;
  int steps_taken = 0;
  for (double target : times) {
    if (!(target >= t_now)) throw DomainError("evolve_density: times must be non-decreasing and >= 0");
    const double span = target - t_now;
    const auto n_steps = static_cast<long>(std::ceil(span / dt_max - 1e-12));
    const double dt = n_steps > 0 ? span / static_cast<double>(n_steps) : 0.0;
    for (long s = 0; s < n_steps; ++s) {
      const double t0 = t_now + dt * static_cast<double>(s);
      if (steps_taken < options.smoothing_steps) {
        const double tm = t0 + 0.5 * dt;
        if (drift.time_dependent) fill_faces(drift, diffusion, grid, barriers, tm, f_new);
        theta_step(grid, barriers, f_new, f_new, 0.5 * dt, 1.0, rho, lower, diag, upper, rhs);
        if (drift.time_dependent) fill_faces(drift, diffusion, grid, barriers, t0 + dt, f_new);
        theta_step(grid, barriers, f_new, f_new, 0.5 * dt, 1.0, rho, lower, diag, upper, rhs);
      } else {
        if (drift.time_dependent) {
          fill_faces(drift, diffusion, grid, barriers, t0, f_old);
          fill_faces(drift, diffusion, grid, barriers, t0 + dt, f_new);
        }
        theta_step(grid, barriers, f_old, f_new, dt, 0.5, rho, lower, diag, upper, rhs);
      }
      ++steps_taken;
      check_positivity(t0 + dt);
    }
    t_now = target;

    GridDensity snap(grid, rho, breaks);
    for (std::size_t k = 0; k < initial_masses.size(); ++k) {
      if (std::abs(snap.sector_masses[k] - initial_masses[k]) > kMassTolerance) {
        throw ConservationError("evolve_density: sector " + std::to_string(k) + " mass moved from " +
                                std::to_string(initial_masses[k]) + " to " +
                                std::to_string(snap.sector_masses[k]));
      }
    }
    out.push_back(std::move(snap));
  }
  return out;
}

GridDensity propagate(const TransitionKernel& kernel, const GridDensity& rho_in, double t0,
                      double t) {
  if (t < t0) throw DomainError("propagate: t must not precede t0");
  if (t == t0) return rho_in;
  std::vector<double> out(rho_in.grid.size());
  kernels::propagate_omp(kernel, rho_in.grid, rho_in.values, t0, t, out);
  GridDensity result(rho_in.grid, std::move(out), rho_in.breakpoints);
  const double m_in = rho_in.mass();
  const double m_out = result.mass();
  if (!std::isfinite(m_out) || std::abs(m_out - m_in) > 1e-4) {
    throw QuadratureError("propagate: output mass " + std::to_string(m_out) +
                          " deviates from input mass " + std::to_string(m_in) +
                          " (grid too coarse for the kernel width or domain too short)");
  }
  return result;
}

ResidualReport fokker_planck_residual(const std::function<double(double, double)>& rho,
                                      const DriftField& drift, double diffusion,
                                      std::span<const double> xs, std::span<const double> ts,
                                      double dx, double dt) {
  ResidualReport r;
  for (double t : ts) {
    for (double x : xs) {
      auto flux_part = [&](double y) { return drift(y, t) * rho(y, t); };
      const double f0 = rho(x, t);
      const double fp1 = rho(x + dx, t), fm1 = rho(x - dx, t);
      const double fp2 = rho(x + 2 * dx, t), fm2 = rho(x - 2 * dx, t);
      const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * dx * dx);
      const double dvr = (-flux_part(x + 2 * dx) + 8 * flux_part(x + dx) - 8 * flux_part(x - dx) +
                          flux_part(x - 2 * dx)) /
                         (12 * dx);
      const double drt =
          (-rho(x, t + 2 * dt) + 8 * rho(x, t + dt) - 8 * rho(x, t - dt) + rho(x, t - 2 * dt)) /
          (12 * dt);
      const double res = drt - (diffusion * d2 - dvr);
      r.max_abs = std::max(r.max_abs, std::abs(res));
      r.scale = std::max({r.scale, std::abs(drt), std::abs(diffusion * d2)});
    }
  }
  return r;
}

}  // namespace nelson
