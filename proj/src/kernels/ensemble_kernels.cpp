#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>

#include "nelson/errors.hpp"
#include "nelson/nelson_sim.hpp"
#include "nelson/rng.hpp"

namespace nelson::kernels {

namespace {

constexpr int kMaxRedraws = 100;
constexpr int kMaxLevel = 16;

enum Purpose : std::uint32_t { kIncrement = 0, kInitial = 1 };

std::size_t sector_index(const std::vector<double>& breaks, double x) {
  return static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
}

double distance_to_break(const std::vector<double>& breaks, double x) {
  const auto it = std::lower_bound(breaks.begin(), breaks.end(), x);
  double d = INFINITY;
  if (it != breaks.end()) d = *it - x;
  if (it != breaks.begin()) d = std::min(d, x - *(it - 1));
  return d;
}

struct PathStepper {
  const EnsemblePlan& plan;
  rng::Key key;
  EnsembleBlock& block;

  bool admissible(double y, std::size_t sector) const {
    if (!std::isfinite(y)) return false;
    const auto& br = plan.breakpoints;
    if (br.empty()) return true;
    return sector_index(br, y) == sector && distance_to_break(br, y) > plan.spec.guard_radius;
  }

  // One increment of length h, split recursively once the redraw budget is
  // spent. sub numbers the pieces at the current level.
  double advance(double x, double t, double h, std::size_t sector, std::uint32_t path,
                 std::uint32_t step, std::uint32_t level, std::uint32_t sub) {
    const double drift = plan.drift->velocity(x, t);
    const double noise = std::sqrt(2.0 * plan.spec.diffusion * h);
    for (std::uint32_t r = 0; r <= kMaxRedraws; ++r) {
      const rng::Counter c{path, step, r | (level << 8) | (sub << 16), kIncrement};
      const double xi = noise > 0.0 ? rng::normal_pair(c, key).first : 0.0;
      const double y = x + drift * h + noise * xi;
      if (admissible(y, sector)) {
        ++block.steps;
        return y;
      }
      ++block.rejections;
      if (noise == 0.0) break;
    }
    if (level >= kMaxLevel)
      throw SingularityError("simulate_ensemble: step halving exhausted near a node", x);
    ++block.substeps;
    const double mid = advance(x, t, 0.5 * h, sector, path, step, level + 1, 2 * sub);
    return advance(mid, t + 0.5 * h, 0.5 * h, sector, path, step, level + 1, 2 * sub + 1);
  }
};

double initial_point(const EnsemblePlan& plan, const rng::Key& key, std::uint32_t path) {
  const auto& spec = plan.spec;
  if (!spec.initial.density) return spec.initial.x0;
  const auto [u, v] = rng::uniform_pair({path, 0, 0, kInitial}, key);
  const auto& cdf = plan.initial_cdf;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(),
                                                                   static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  const Grid1D& g = spec.initial.density->grid;
  const double xi = g.x(i);
  double lo = i == 0 ? g.lo() : xi - 0.5 * g.spacing();
  double hi = i + 1 == g.size() ? g.hi() : xi + 0.5 * g.spacing();
  // Keep the draw inside the sector of the bin centre.
  const auto& br = plan.breakpoints;
  const std::size_t s = sector_index(br, xi);
  if (s > 0) lo = std::max(lo, br[s - 1] + spec.guard_radius);
  if (s < br.size()) hi = std::min(hi, br[s] - spec.guard_radius);
  return lo + v * (hi - lo);
}

void record(const EnsemblePlan& plan, EnsembleBlock& b, std::size_t snap, double x) {
  const Grid1D& g = plan.spec.grid;
  const std::size_t nb = g.size();
  if (x < g.lo()) {
    ++b.below[snap];
  } else if (x > g.hi()) {
    ++b.above[snap];
  } else {
    ++b.counts[snap * nb + g.nearest(x)];
  }
  ++b.sector_counts[snap * (plan.breakpoints.size() + 1) + sector_index(plan.breakpoints, x)];
  b.sum[snap] += x;
  b.sum_sq[snap] += x * x;
}

EnsembleBlock run_block(const EnsemblePlan& plan, std::size_t block_index) {
  const auto& spec = plan.spec;
  const std::size_t n_snap = spec.times.size();
  const std::size_t n_sec = plan.breakpoints.size() + 1;
  EnsembleBlock b;
  b.counts.assign(n_snap * spec.grid.size(), 0);
  b.below.assign(n_snap, 0);
  b.above.assign(n_snap, 0);
  b.sector_counts.assign(n_snap * n_sec, 0);
  b.sum.assign(n_snap, 0.0);
  b.sum_sq.assign(n_snap, 0.0);

  const rng::Key key = rng::key_from_seed(spec.seed);
  PathStepper stepper{plan, key, b};
  const std::size_t first = block_index * plan.block_size;
  const std::size_t last = std::min(spec.n_paths, first + plan.block_size);
  for (std::size_t p = first; p < last; ++p) {
    const auto path = static_cast<std::uint32_t>(p);
    double x = initial_point(plan, key, path);
    const std::size_t sector = sector_index(plan.breakpoints, x);
    double t = spec.t_start;
    std::uint32_t step = 0;
    for (std::size_t k = 0; k < n_snap; ++k) {
      const double h = plan.step_size[k];
      for (std::uint64_t j = 0; j < plan.steps[k]; ++j) {
        ++step;
        x = stepper.advance(x, t, h, sector, path, step, 0, 0);
        t += h;
      }
      t = spec.times[k];
      if (sector_index(plan.breakpoints, x) != sector) ++b.escaped;
      record(plan, b, k, x);
    }
  }
  return b;
}

}  // namespace

std::vector<EnsembleBlock> ensemble_serial(const EnsemblePlan& plan) {
  std::vector<EnsembleBlock> out(plan.block_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = run_block(plan, i);
  return out;
}

std::vector<EnsembleBlock> ensemble_omp(const EnsemblePlan& plan) {
  std::vector<EnsembleBlock> out(plan.block_count());
  const auto n = static_cast<long>(out.size());
  bool failed = false;
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_block(plan, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      {
        if (!failed) {
          failed = true;
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace nelson::kernels
