#pragma once

// Data-parallel inner loops. Each kernel has a serial reference and an
// OpenMP version that must produce bit-identical results; the public
// operations call the OpenMP version.

#include <cstdint>
#include <span>
#include <vector>

#include "nelson/fpcore.hpp"

namespace nelson::kernels {

// out[i] = sum_j w_j K(x_i, t | y_j, t0) rho_j over all j with rho_j != 0.
void propagate_serial(const TransitionKernel& kernel, const Grid1D& grid,
                      std::span<const double> rho_in, double t0, double t,
                      std::span<double> out);
void propagate_omp(const TransitionKernel& kernel, const Grid1D& grid,
                   std::span<const double> rho_in, double t0, double t, std::span<double> out);

// Per-block partial results of a path ensemble. Blocks are fixed-size ranges
// of path indices, so the reduction order never depends on thread count.
struct EnsembleBlock {
  std::vector<std::uint64_t> counts;         // [snapshot][bin]
  std::vector<std::uint64_t> below;          // [snapshot] paths left of the grid
  std::vector<std::uint64_t> above;          // [snapshot] paths right of the grid
  std::vector<std::uint64_t> sector_counts;  // [snapshot][sector]
  std::vector<double> sum;                   // [snapshot]
  std::vector<double> sum_sq;                // [snapshot]
  std::uint64_t rejections = 0;
  std::uint64_t steps = 0;
  std::uint64_t substeps = 0;
  std::uint64_t escaped = 0;
};

}  // namespace nelson::kernels
