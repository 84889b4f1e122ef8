#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nelson/grid.hpp"

namespace nelson {

enum class BoundaryKind { dirichlet, zero_flux };

/// -D G'' + q G = lambda G on [lo, hi], the symmetric form of the
/// Fokker-Planck generator under rho = sqrt(h) g with q = v^2/(4D) + v'/2.
///
/// `log_ground` is ln sqrt(h) up to a constant (W / 2D). When present the
/// discrete potential is built from it so that sqrt(h) is an exact null
/// vector of the discrete operator.
struct SLProblem {
  double lo = 0.0;
  double hi = 1.0;
  double diffusion = 1.0;
  std::function<double(double)> q;
  std::function<double(double)> drift;
  std::function<double(double)> log_ground;
  BoundaryKind left = BoundaryKind::zero_flux;
  BoundaryKind right = BoundaryKind::zero_flux;
};

/// Assembles q from the drift on [lo, hi]. Ends lying on a drift singularity
/// get Dirichlet conditions (sqrt(h) vanishes there); other ends are treated
/// as zero-flux walls. q uses drift.derivative when available and a central
/// difference otherwise.
SLProblem build_sl(const DriftField& drift, double diffusion, double lo, double hi);

enum class Parity { even, odd, none };

struct EigenSystem {
  Grid1D grid;
  std::vector<double> eigenvalues;             // ascending
  std::vector<std::vector<double>> functions;  // G_n on every grid point
  std::vector<Parity> parity;                  // only set on symmetric intervals
  double resolution_change = 0.0;              // max relative change at half resolution
  std::vector<std::string> warnings;
};

/// Lowest k eigenpairs of the three-point discretization (LAPACK dstevr on
/// the mass-symmetrized tridiagonal matrix). Eigenfunctions satisfy
/// sum_i w_i G_n(x_i)^2 = 1 with trapezoid weights w and are positive near the
/// left end. The grid must span exactly [problem.lo, problem.hi].
///
/// Throws DomainError if k > n_points / 4. Records a resolution warning when
/// an eigenvalue moves by more than 0.5% on a grid of half resolution.
EigenSystem solve_eigs_fd(const SLProblem& problem, const Grid1D& grid, int k);

/// Number of sign changes of a grid function, ignoring values below
/// `rel_floor` times its maximum magnitude.
int count_sign_changes(const std::vector<double>& f, double rel_floor = 1e-10);

struct ShootingRoot {
  double mu = 0.0;
  Parity parity = Parity::none;
};

struct ShootingResult {
  std::vector<ShootingRoot> roots;  // ascending; roots[0] is the invariant mode mu = 0
  std::vector<std::string> warnings;

  std::vector<double> mus() const;
  std::vector<double> nonzero(Parity p) const;
};

inline constexpr double kShootingTruncation = 8.0;

/// Adimensional eigenvalues mu = lambda / omega of the oscillator level n in
/// the node-bounded sector (lo, hi), via the Kummer solutions
/// y1 = M(-(mu+n)/2, 1/2, x^2/2) and y2 = x M(-(mu+n-1)/2, 3/2, x^2/2) of
/// y'' - x y' + (mu + n) y = 0. Infinite ends are truncated at
/// |x| = kShootingTruncation with y = 0 there; passing the truncation
/// point itself as an end is the same as passing infinity.
///
/// Brackets sign changes on (0, 200] with step 0.25, bisects to 1e-8 and
/// stops after k nonzero roots. On the symmetric inner sector of n = 2 the
/// even and odd classes are solved separately (y1(1) = 0 and y2(1) = 0) and
/// up to k roots of each class are returned. Throws DomainError unless
/// n is 1 or 2 and (lo, hi) is one of its sectors.
ShootingResult solve_eigs_shooting(int n, double lo, double hi, int k);

struct Expansion {
  std::vector<double> coefficients;
  std::size_t excluded_points = 0;  // points where sqrt(h) < 1e-300
};

/// c_n = int rho G_n / sqrt(h) dx by the trapezoid rule on the system grid.
Expansion expand(const GridDensity& rho_in, const EigenSystem& sys, const GridDensity& h);

struct SpectralSnapshot {
  GridDensity density;
  double tail_bound = 0.0;  // |c_last| exp(-lambda_last t)
  bool truncated = false;   // tail_bound above 1e-10
  bool clipped = false;
};

/// rho(x, t) = sum_n c_n exp(-lambda_n t) sqrt(h) G_n. Negative dust from
/// truncation is clipped and the result rescaled to mass c_0.
SpectralSnapshot spectral_density(const EigenSystem& sys, const std::vector<double>& coefficients,
                                  const GridDensity& h, double t);

}  // namespace nelson
