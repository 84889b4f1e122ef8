#include "nelson/nelson_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "nelson/errors.hpp"
#include "nelson/fpcore.hpp"

namespace nelson {

namespace kernels {

EnsemblePlan plan_ensemble(const DriftField& drift, const EnsembleSpec& spec) {
  if (spec.n_paths == 0) throw DomainError("simulate_ensemble: n_paths must be >= 1");
  if (spec.n_paths > std::numeric_limits<std::uint32_t>::max())
    throw DomainError("simulate_ensemble: n_paths exceeds the 32-bit path counter");
  if (!(spec.dt > 0.0)) throw DomainError("simulate_ensemble: dt must be positive");
  if (!(spec.diffusion >= 0.0)) throw DomainError("simulate_ensemble: D must be >= 0");
  if (!(spec.guard_radius >= 0.0)) throw DomainError("simulate_ensemble: guard radius must be >= 0");
  if (spec.rate_scale > 0.0 && spec.dt > 0.01 / spec.rate_scale)
    throw DomainError("simulate_ensemble: dt exceeds 0.01 / omega");
  if (!drift.velocity) throw DomainError("simulate_ensemble: drift has no velocity");

  EnsemblePlan plan;
  plan.drift = &drift;
  plan.spec = spec;
  if (drift.singularities) {
    plan.breakpoints = *drift.singularities;
    std::sort(plan.breakpoints.begin(), plan.breakpoints.end());
  } else {
    plan.breakpoints = split_domain(drift, spec.grid).breakpoints;
  }

  double prev = spec.t_start;
  for (double t : spec.times) {
    if (!(t >= prev)) throw DomainError("simulate_ensemble: times must be non-decreasing from t_start");
    const double span = t - prev;
    const auto n = static_cast<std::uint64_t>(std::ceil(span / spec.dt - 1e-9));
    if (n > std::numeric_limits<std::uint32_t>::max())
      throw DomainError("simulate_ensemble: too many steps for the step counter");
    plan.steps.push_back(n);
    plan.step_size.push_back(n > 0 ? span / static_cast<double>(n) : 0.0);
    prev = t;
  }
  std::uint64_t total = 0;
  for (auto n : plan.steps) total += n;
  if (total > std::numeric_limits<std::uint32_t>::max())
    throw DomainError("simulate_ensemble: too many steps for the step counter");

  auto near_node = [&](double x) {
    for (double b : plan.breakpoints)
      if (std::abs(x - b) <= spec.guard_radius) return true;
    return false;
  };
  if (spec.initial.density) {
    const GridDensity& rho = *spec.initial.density;
    plan.initial_cdf.resize(rho.grid.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.grid.size(); ++i) {
      if (!(rho.values[i] >= 0.0)) throw DomainError("simulate_ensemble: initial density is negative");
      acc += rho.grid.weight(i) * rho.values[i];
      plan.initial_cdf[i] = acc;
    }
    if (!(acc > 0.0) || !std::isfinite(acc))
      throw DomainError("simulate_ensemble: initial density has no mass");
  } else {
    if (!std::isfinite(spec.initial.x0)) throw DomainError("simulate_ensemble: x0 is not finite");
    if (near_node(spec.initial.x0))
      throw DomainError("simulate_ensemble: x0 lies within the guard radius of a node");
  }
  return plan;
}

}  // namespace kernels

EnsembleResult simulate_ensemble(const DriftField& drift, const EnsembleSpec& spec) {
  const auto plan = kernels::plan_ensemble(drift, spec);
  const auto blocks = kernels::ensemble_omp(plan);

  const std::size_t n_snap = spec.times.size();
  const std::size_t nb = spec.grid.size();
  const std::size_t n_sec = plan.breakpoints.size() + 1;
  const auto n = static_cast<double>(spec.n_paths);

  EnsembleResult res;
  res.breakpoints = plan.breakpoints;
  for (std::size_t k = 0; k < n_snap; ++k) {
    EmpiricalDensity e(spec.times[k], spec.grid);
    e.n_paths = spec.n_paths;
    e.counts.assign(nb, 0);
    e.sector_masses.assign(n_sec, 0.0);
    std::vector<std::uint64_t> sec(n_sec, 0);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& b : blocks) {
      for (std::size_t i = 0; i < nb; ++i) e.counts[i] += b.counts[k * nb + i];
      for (std::size_t s = 0; s < n_sec; ++s) sec[s] += b.sector_counts[k * n_sec + s];
      e.below += b.below[k];
      e.above += b.above[k];
      sum += b.sum[k];
      sum_sq += b.sum_sq[k];
    }
    e.values.resize(nb);
    for (std::size_t i = 0; i < nb; ++i)
      e.values[i] = static_cast<double>(e.counts[i]) / (n * spec.grid.weight(i));
    for (std::size_t s = 0; s < n_sec; ++s) e.sector_masses[s] = static_cast<double>(sec[s]) / n;
    e.mean = sum / n;
    e.variance = std::max(0.0, sum_sq / n - e.mean * e.mean);
    res.snapshots.push_back(std::move(e));
  }
  for (const auto& b : blocks) {
    res.rejections += b.rejections;
    res.steps += b.steps;
    res.substeps += b.substeps;
    res.escaped += b.escaped;
  }
  res.fidelity_warning = static_cast<double>(res.rejections) > 1e-3 * static_cast<double>(res.steps);
  return res;
}

Comparison compare(const EmpiricalDensity& empirical, const std::function<double(double)>& analytic) {
  // 5-point Gauss-Legendre on [-1, 1].
  static constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                                0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665,
                                                  0.5688888888888889, 0.4786286704993665,
                                                  0.2369268850561891};
  const Grid1D& g = empirical.grid;
  const double h = g.spacing();
  const auto n = static_cast<double>(empirical.n_paths);
  Comparison out;
  double cdf_emp = static_cast<double>(empirical.below) / n;
  double cdf_ana = 0.0;
  out.ks = cdf_emp;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.x(i);
    const double lo = i == 0 ? g.lo() : xi - 0.5 * h;
    const double hi = i + 1 == g.size() ? g.hi() : xi + 0.5 * h;
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    double mass = 0.0;
    for (std::size_t q = 0; q < kNodes.size(); ++q) mass += kWeights[q] * analytic(c + r * kNodes[q]);
    const double emp_mass = static_cast<double>(empirical.counts[i]) / n;
    out.l1 += std::abs(emp_mass - r * mass);
    cdf_ana += r * mass;
    cdf_emp += emp_mass;
    out.ks = std::max(out.ks, std::abs(cdf_emp - cdf_ana));
  }
  return out;
}

}  // namespace nelson
