#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nelson/grid.hpp"
#include "nelson/kernels.hpp"

namespace nelson {

/// Starting law of the paths: a point mass or a grid density (sampled by
/// inverse CDF over its trapezoid bins, uniformly inside each bin).
struct InitialLaw {
  double x0 = 0.0;
  std::optional<GridDensity> density;

  static InitialLaw delta(double x0) { return {x0, std::nullopt}; }
  static InitialLaw from(GridDensity rho) { return {0.0, std::move(rho)}; }
};

struct EnsembleSpec {
  std::size_t n_paths = 10000;
  InitialLaw initial;
  double t_start = 0.0;
  std::vector<double> times;  // non-decreasing, >= t_start
  double dt = 1e-3;
  double diffusion = 0.5;
  std::uint64_t seed = 1;
  double guard_radius = 1e-6;  // absolute; use 1e-6 sigma0
  double rate_scale = 0.0;     // omega; when > 0, dt <= 0.01 / omega is enforced
  Grid1D grid{-1.0, 1.0, 101};
};

/// Histogram on the bins of a Grid1D (bin i centred at x_i, width w_i).
struct EmpiricalDensity {
  EmpiricalDensity(double time, Grid1D g) : t(time), grid(std::move(g)) {}

  double t = 0.0;
  Grid1D grid;
  std::vector<std::uint64_t> counts;
  std::vector<double> values;  // counts / (n_paths w_i)
  std::uint64_t below = 0;     // paths left of the grid
  std::uint64_t above = 0;     // paths right of the grid
  std::size_t n_paths = 0;
  std::vector<double> sector_masses;
  double mean = 0.0;
  double variance = 0.0;

  GridDensity as_grid_density() const { return GridDensity(grid, values); }
};

struct EnsembleResult {
  std::vector<EmpiricalDensity> snapshots;
  std::vector<double> breakpoints;
  std::uint64_t rejections = 0;  // redrawn increments
  std::uint64_t steps = 0;       // accepted increments
  std::uint64_t substeps = 0;    // steps split after exhausting redraws
  std::uint64_t escaped = 0;     // paths found outside their initial sector
  bool fidelity_warning = false; // rejections above 0.1% of steps
};

/// Euler-Maruyama ensemble of dx = v dt + sqrt(2 D dt) xi with a
/// counter-based generator keyed by (seed, path, step). A step that lands
/// within the guard radius of a drift singularity, or across one, is redrawn
/// (up to 100 times) and then split into two half steps, so paths never
/// leave their initial sector. Results are bit-identical for any thread
/// count.
///
/// Throws DomainError for an invalid spec or a start within the guard
/// radius of a singularity.
EnsembleResult simulate_ensemble(const DriftField& drift, const EnsembleSpec& spec);

struct Comparison {
  double l1 = 0.0;
  double ks = 0.0;
};

/// L1 = sum_i |count_i / n - F_i| with F_i the analytic mass of bin i
/// (5-point Gauss-Legendre), i.e. the L1 gap to the bin-averaged density.
/// KS = max gap between the two CDFs over bin edges. Mass of f outside the
/// grid is assumed negligible.
Comparison compare(const EmpiricalDensity& empirical, const std::function<double(double)>& analytic);

namespace kernels {

/// Precomputed, immutable description of an ensemble run.
struct EnsemblePlan {
  const DriftField* drift = nullptr;
  EnsembleSpec spec;
  std::vector<double> breakpoints;
  std::vector<double> initial_cdf;   // cumulative bin masses for density starts
  std::vector<std::uint64_t> steps;  // steps before each snapshot
  std::vector<double> step_size;     // step length before each snapshot
  std::size_t block_size = 4096;

  std::size_t block_count() const {
    return (spec.n_paths + block_size - 1) / block_size;
  }
};

EnsemblePlan plan_ensemble(const DriftField& drift, const EnsembleSpec& spec);

std::vector<EnsembleBlock> ensemble_serial(const EnsemblePlan& plan);
std::vector<EnsembleBlock> ensemble_omp(const EnsemblePlan& plan);

}  // namespace kernels

}  // namespace nelson
