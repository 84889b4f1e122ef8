#include "nelson/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "nelson/errors.hpp"
#include "nelson/specfun.hpp"

namespace nelson {

namespace {

constexpr double kResolutionTolerance = 0.005;
constexpr double kTailTolerance = 1e-10;
constexpr double kSqrtHFloor = 1e-300;

bool touches(double a, double b, double scale) { return std::abs(a - b) <= 1e-9 * scale; }

struct RawEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> functions;
};

RawEigen solve_tridiagonal(const SLProblem& p, const Grid1D& grid, int k) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double D = p.diffusion;
  const std::size_t i0 = p.left == BoundaryKind::dirichlet ? 1 : 0;
  const std::size_t i1 = p.right == BoundaryKind::dirichlet ? n - 2 : n - 1;
  const std::size_t m = i1 - i0 + 1;

  std::vector<double> diag(m), off(m, 0.0), w(m);
  for (std::size_t r = 0; r < m; ++r) w[r] = grid.weight(i0 + r);

  if (p.log_ground) {
    // Stiffness sum_faces D/h s_i s_j (G_j/s_j - G_i/s_i)^2 in G = s g; the
    // vector s = sqrt(h) is annihilated exactly.
    std::vector<double> lg(n);
    for (std::size_t i = 0; i < n; ++i) lg[i] = p.log_ground(grid.x(i));
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t i = i0 + r;
      double s = 0.0;
      if (i > 0) s += std::exp(lg[i - 1] - lg[i]);
      if (i + 1 < n) s += std::exp(lg[i + 1] - lg[i]);
      diag[r] = D / h * s;
      if (!std::isfinite(diag[r])) {
        throw DomainError("solve_eigs_fd: ground state not finite near x = " +
                          std::to_string(grid.x(i)));
      }
    }
  } else {
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t i = i0 + r;
      double faces = 0.0;
      if (i > 0) faces += 1.0;
      if (i + 1 < n) faces += 1.0;
      diag[r] = D / h * faces + w[r] * p.q(grid.x(i));
    }
    // Robin rows for zero flux: D G' = (v/2) G at the wall.
    if (p.left == BoundaryKind::zero_flux) diag.front() += 0.5 * p.drift(grid.x(0));
    if (p.right == BoundaryKind::zero_flux) diag.back() -= 0.5 * p.drift(grid.x(n - 1));
  }
  for (std::size_t r = 0; r + 1 < m; ++r) off[r] = -D / h / std::sqrt(w[r] * w[r + 1]);
  for (std::size_t r = 0; r < m; ++r) diag[r] /= w[r];

  const auto mm = static_cast<lapack_int>(m);
  lapack_int found = 0;
  std::vector<double> vals(m), z(m * static_cast<std::size_t>(k));
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', mm, diag.data(), off.data(), 0.0, 0.0, 1, k, 0.0,
                     &found, vals.data(), z.data(), mm, support.data());
  if (info != 0 || found != k) {
    throw AccuracyError("solve_eigs_fd: dstevr failed (info " + std::to_string(info) + ")",
                        found > 0 ? vals[0] : 0.0);
  }

  RawEigen out;
  out.values.assign(vals.begin(), vals.begin() + k);
  for (int e = 0; e < k; ++e) {
    std::vector<double> g(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
      g[i0 + r] = z[static_cast<std::size_t>(e) * m + r] / std::sqrt(w[r]);
    const double peak = std::abs(*std::max_element(
        g.begin(), g.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
    for (double v : g) {
      if (std::abs(v) > 1e-8 * peak) {
        if (v < 0.0)
          for (double& u : g) u = -u;
        break;
      }
    }
    out.functions.push_back(std::move(g));
  }
  return out;
}

double y_even(int n, double mu, double x) { return kummer_m(-(mu + n) / 2.0, 0.5, 0.5 * x * x).value; }
double y_odd(int n, double mu, double x) {
  return x * kummer_m(-(mu + n - 1) / 2.0, 1.5, 0.5 * x * x).value;
}

template <class F>
std::vector<double> scan_roots(F&& f, int k) {
  constexpr double kStart = 1e-6, kStop = 200.0, kStep = 0.25, kTol = 1e-8;
  std::vector<double> roots;
  double a = kStart;
  double fa = f(a);
  for (double b = kStep; b <= kStop + 1e-12 && static_cast<int>(roots.size()) < k; b += kStep) {
    const double fb = f(b);
    if (fb == 0.0) {
      roots.push_back(b);
    } else if (std::signbit(fa) != std::signbit(fb) && fa != 0.0) {
      double lo = a, hi = b, flo = fa;
      while (hi - lo > kTol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace

SLProblem build_sl(const DriftField& drift, double diffusion, double lo, double hi) {
  if (!(diffusion > 0.0)) throw DomainError("build_sl: diffusion must be positive");
  if (!(lo < hi)) throw DomainError("build_sl: need lo < hi");
  SLProblem p;
  p.lo = lo;
  p.hi = hi;
  p.diffusion = diffusion;
  p.drift = [drift](double x) { return drift(x); };
  if (drift.derivative) {
    p.q = [drift, diffusion](double x) {
      const double v = drift(x);
      return v * v / (4.0 * diffusion) + 0.5 * drift.derivative(x, 0.0);
    };
  } else {
    const double step = 1e-5 * (hi - lo);
    p.q = [drift, diffusion, step](double x) {
      const double v = drift(x);
      const double dv = (drift(x + step) - drift(x - step)) / (2.0 * step);
      return v * v / (4.0 * diffusion) + 0.5 * dv;
    };
  }
  if (drift.potential) {
    p.log_ground = [drift, diffusion](double x) { return drift.potential(x) / (2.0 * diffusion); };
  }
  if (drift.singularities) {
    for (double s : *drift.singularities) {
      if (touches(s, lo, hi - lo)) p.left = BoundaryKind::dirichlet;
      if (touches(s, hi, hi - lo)) p.right = BoundaryKind::dirichlet;
    }
  }
  return p;
}

EigenSystem solve_eigs_fd(const SLProblem& problem, const Grid1D& grid, int k) {
  const double span = problem.hi - problem.lo;
  if (!touches(grid.lo(), problem.lo, span) || !touches(grid.hi(), problem.hi, span))
    throw DomainError("solve_eigs_fd: grid does not span the problem interval");
  if (k < 1 || static_cast<std::size_t>(k) > grid.size() / 4)
    throw DomainError("solve_eigs_fd: k must lie in [1, n_points/4]");
  if (!problem.log_ground && !problem.q) throw DomainError("solve_eigs_fd: problem has no potential");

  RawEigen fine = solve_tridiagonal(problem, grid, k);
  EigenSystem sys{grid, std::move(fine.values), std::move(fine.functions), {}, 0.0, {}};

  const std::size_t n_half = (grid.size() - 1) / 2 + 1;
  if (n_half >= Grid1D::kMinPoints && static_cast<std::size_t>(k) <= n_half / 4) {
    const Grid1D coarse_grid(grid.lo(), grid.hi(), n_half);
    const RawEigen coarse = solve_tridiagonal(problem, coarse_grid, k);
    const double scale = std::max(std::abs(sys.eigenvalues.back()), 1e-300);
    for (int e = 0; e < k; ++e) {
      const double a = sys.eigenvalues[static_cast<std::size_t>(e)];
      // The invariant mode sits at zero; compare it against the spectral scale.
      const double ref = std::abs(a) > 1e-6 * scale ? std::abs(a) : scale;
      const double change = std::abs(a - coarse.values[static_cast<std::size_t>(e)]) / ref;
      sys.resolution_change = std::max(sys.resolution_change, change);
    }
    if (sys.resolution_change > kResolutionTolerance) {
      sys.warnings.push_back("resolution: eigenvalues change by " +
                             std::to_string(100.0 * sys.resolution_change) +
                             "% at half resolution; refine the grid");
    }
  }

  const bool symmetric = std::abs(grid.lo() + grid.hi()) <= 1e-12 * span;
  const std::size_t n = grid.size();
  for (const auto& g : sys.functions) {
    Parity par = Parity::none;
    if (symmetric) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += grid.weight(i) * g[i] * g[n - 1 - i];
      if (dot > 0.5) par = Parity::even;
      if (dot < -0.5) par = Parity::odd;
    }
    sys.parity.push_back(par);
  }
  return sys;
}

int count_sign_changes(const std::vector<double>& f, double rel_floor) {
  double peak = 0.0;
  for (double v : f) peak = std::max(peak, std::abs(v));
  int changes = 0;
  int last = 0;
  for (double v : f) {
    if (std::abs(v) <= rel_floor * peak) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

std::vector<double> ShootingResult::mus() const {
  std::vector<double> out;
  for (const auto& r : roots) out.push_back(r.mu);
  return out;
}

std::vector<double> ShootingResult::nonzero(Parity p) const {
  std::vector<double> out;
  for (const auto& r : roots)
    if (r.mu > 0.0 && (p == Parity::none || r.parity == p)) out.push_back(r.mu);
  return out;
}

ShootingResult solve_eigs_shooting(int n, double lo, double hi, int k) {
  // The truncation point stands in for an infinite end.
  if (lo == -kShootingTruncation) lo = -std::numeric_limits<double>::infinity();
  if (hi == kShootingTruncation) hi = std::numeric_limits<double>::infinity();
  if (n != 1 && n != 2) throw DomainError("solve_eigs_shooting: level must be 1 or 2");
  if (k < 1) throw DomainError("solve_eigs_shooting: k must be positive");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::vector<double> bounds =
      n == 1 ? std::vector<double>{-inf, 0.0, inf} : std::vector<double>{-inf, -1.0, 1.0, inf};
  bool valid = false;
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s)
    valid = valid || (lo == bounds[s] && hi == bounds[s + 1]);
  if (!valid) {
    throw DomainError("solve_eigs_shooting: (" + std::to_string(lo) + ", " + std::to_string(hi) +
                      ") is not a node-bounded sector of level " + std::to_string(n));
  }

  ShootingResult res;
  res.roots.push_back({0.0, n == 2 && lo == -1.0 ? Parity::even : Parity::none});
  if (n == 2 && lo == -1.0) {
    // y1 is even and y2 odd; Dirichlet at both nodes +-1 decouples into
    // y1(1) = 0 (even modes) and y2(1) = 0 (odd modes).
    for (double mu : scan_roots([](double mu) { return y_even(2, mu, 1.0); }, k))
      res.roots.push_back({mu, Parity::even});
    for (double mu : scan_roots([](double mu) { return y_odd(2, mu, 1.0); }, k))
      res.roots.push_back({mu, Parity::odd});
    std::sort(res.roots.begin(), res.roots.end(),
              [](const ShootingRoot& a, const ShootingRoot& b) { return a.mu < b.mu; });
    if (res.nonzero(Parity::even).size() < static_cast<std::size_t>(k) ||
        res.nonzero(Parity::odd).size() < static_cast<std::size_t>(k))
      res.warnings.push_back("incomplete spectrum: fewer than k roots per class in (0, 200]");
    return res;
  }

  const double a = std::isinf(lo) ? -kShootingTruncation : lo;
  const double b = std::isinf(hi) ? kShootingTruncation : hi;
  auto det = [n, a, b](double mu) {
    return y_even(n, mu, a) * y_odd(n, mu, b) - y_even(n, mu, b) * y_odd(n, mu, a);
  };
  for (double mu : scan_roots(det, k)) res.roots.push_back({mu, Parity::none});
  if (res.roots.size() < static_cast<std::size_t>(k) + 1)
    res.warnings.push_back("incomplete spectrum: fewer than k roots in (0, 200]");
  return res;
}

Expansion expand(const GridDensity& rho_in, const EigenSystem& sys, const GridDensity& h) {
  const Grid1D& g = sys.grid;
  if (rho_in.grid.size() != g.size() || h.grid.size() != g.size())
    throw DomainError("expand: density and eigen system grids differ");
  Expansion out;
  std::vector<double> inv_sqrt_h(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = std::sqrt(std::max(h.values[i], 0.0));
    if (s < kSqrtHFloor) {
      if (rho_in.values[i] != 0.0) ++out.excluded_points;
      continue;
    }
    inv_sqrt_h[i] = 1.0 / s;
  }
  for (const auto& gn : sys.functions) {
    double c = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      c += g.weight(i) * rho_in.values[i] * gn[i] * inv_sqrt_h[i];
    out.coefficients.push_back(c);
  }
  return out;
}

SpectralSnapshot spectral_density(const EigenSystem& sys, const std::vector<double>& coefficients,
                                  const GridDensity& h, double t) {
  const Grid1D& g = sys.grid;
  const std::size_t modes = std::min(coefficients.size(), sys.eigenvalues.size());
  if (modes == 0) throw DomainError("spectral_density: no modes");
  std::vector<double> values(g.size(), 0.0);
  for (std::size_t k = 0; k < modes; ++k) {
    const double amp = coefficients[k] * std::exp(-sys.eigenvalues[k] * t);
    for (std::size_t i = 0; i < g.size(); ++i)
      values[i] += amp * std::sqrt(std::max(h.values[i], 0.0)) * sys.functions[k][i];
  }
  const double tail = std::abs(coefficients[modes - 1]) * std::exp(-sys.eigenvalues[modes - 1] * t);
  bool clipped = false;
  for (double& v : values) {
    if (v < 0.0) {
      clipped = clipped || v < -1e-12;
      v = 0.0;
    }
  }
  SpectralSnapshot snap{GridDensity(g, std::move(values), h.breakpoints), tail,
                        tail > kTailTolerance, clipped};
  if (snap.clipped) {
    const double m = snap.density.mass();
    if (m > 0.0) {
      for (double& v : snap.density.values) v *= coefficients[0] / m;
      snap.density.refresh_sector_masses();
    }
  }
  return snap;
}

}  // namespace nelson
