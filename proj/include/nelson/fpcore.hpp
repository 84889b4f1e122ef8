#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nelson/grid.hpp"

namespace nelson {

/// Splits [lo, hi] at the poles of the drift. Known singularities are used
/// as given; otherwise poles are located as sign changes of 1/v where |1/v|
/// passes continuously through zero (a zero of v makes 1/v jump instead).
SectorDecomposition split_domain(const DriftField& drift, const Grid1D& grid);

/// Invariant density N^-1 exp(int v / D) of a time-independent drift with
/// constant D, normalized by the trapezoid rule over the grid. The grid is
/// taken as the domain (zero-flux ends). Grid points lying on a singularity
/// get density zero. Throws DomainError when the exponent or the
/// normalization is not finite.
GridDensity invariant_density(const DriftField& drift, double diffusion, const Grid1D& grid);

struct EvolveOptions {
  // Upper bound on the time step; 0 leaves only the built-in bounds
  // h^2 / (2D) and 0.05 / rate_scale.
  double max_dt = 0.0;
  // Characteristic rate (omega) of the drift; 0 disables the 0.05/rate bound.
  double rate_scale = 0.0;
  // Leading steps taken as two backward-Euler half steps to damp the
  // Crank-Nicolson response to rough initial data.
  int smoothing_steps = 2;
};

/// Crank-Nicolson evolution of d_t rho = d_x (D d_x rho - v rho) in
/// exponentially fitted (Chang-Cooper / Scharfetter-Gummel) flux form, with
/// zero flux at both grid ends and across every drift singularity. Returns the
/// density at each requested time (times must be non-decreasing and >= 0,
/// measured from the time of rho0 = 0).
///
/// Throws ConservationError if any sector mass drifts by more than 1e-6,
/// PositivityError if a value drops below -1e-10, and DomainError if rho0 is
/// nonzero on a grid point that coincides with a singularity.
std::vector<GridDensity> evolve_density(const DriftField& drift, double diffusion,
                                        const GridDensity& rho0, std::span<const double> times,
                                        const EvolveOptions& options = {});

/// Transition density p(x, t | y, t0).
using TransitionKernel = std::function<double(double x, double t, double y, double t0)>;

/// Chapman-Kolmogorov step: out(x) = int p(x,t|y,t0) rho_in(y) dy by the
/// trapezoid rule. At t == t0 the input is returned unchanged. Throws
/// QuadratureError when the output mass differs from the input mass by more
/// than 1e-4.
GridDensity propagate(const TransitionKernel& kernel, const GridDensity& rho_in, double t0,
                      double t);

struct ResidualReport {
  double max_abs = 0.0;
  double scale = 0.0;  // max |d_t rho| or |D d_xx rho| over the sample
  double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
};

/// Finite-difference residual of the forward Fokker-Planck equation for a
/// callable density rho(x, t) over a tensor sample of points. Fourth-order
/// central differences with steps dx, dt.
ResidualReport fokker_planck_residual(const std::function<double(double, double)>& rho,
                                      const DriftField& drift, double diffusion,
                                      std::span<const double> xs, std::span<const double> ts,
                                      double dx, double dt);

}  // namespace nelson
