#include <cstddef>

#include "nelson/kernels.hpp"

namespace nelson::kernels {

namespace {

// One output point; the inner sum always runs in source order so the serial
// and threaded versions agree bit for bit.
double propagate_point(const TransitionKernel& kernel, const Grid1D& grid,
                       std::span<const double> rho_in, double t0, double t, double x) {
  double s = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (rho_in[j] == 0.0) continue;
    s += grid.weight(j) * kernel(x, t, grid.x(j), t0) * rho_in[j];
  }
  return s;
}

}  // namespace

void propagate_serial(const TransitionKernel& kernel, const Grid1D& grid,
                      std::span<const double> rho_in, double t0, double t,
                      std::span<double> out) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    out[i] = propagate_point(kernel, grid, rho_in, t0, t, grid.x(i));
}

void propagate_omp(const TransitionKernel& kernel, const Grid1D& grid,
                   std::span<const double> rho_in, double t0, double t, std::span<double> out) {
  const auto n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = propagate_point(kernel, grid, rho_in, t0, t, grid.x(k));
  }
}

}  // namespace nelson::kernels
