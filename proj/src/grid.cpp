#include "nelson/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nelson/errors.hpp"
#include "nelson/states.hpp"

namespace nelson {

Grid1D::Grid1D(double lo, double hi, std::size_t n_points) : lo_(lo), hi_(hi), n_(n_points) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw DomainError("Grid1D: need finite lo < hi");
  }
  if (n_points < kMinPoints) {
    throw DomainError("Grid1D: need at least " + std::to_string(kMinPoints) + " points");
  }
  h_ = (hi - lo) / static_cast<double>(n_points - 1);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

std::vector<double> Grid1D::trapezoid_weights() const {
  std::vector<double> w(n_, h_);
  w.front() = w.back() = 0.5 * h_;
  return w;
}

std::size_t Grid1D::nearest(double x) const {
  const double r = std::round((x - lo_) / h_);
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(n_ - 1)) return n_ - 1;
  return static_cast<std::size_t>(r);
}

DriftField DriftField::from_state(const StationaryState& state) {
  DriftField f;
  f.velocity = [state](double x, double) { return state.drift(x); };
  f.derivative = [state](double x, double) { return state.drift_derivative(x); };
  const double two_d = 2.0 * state.params().diffusion();
  f.potential = [state, two_d](double x) { return two_d * state.log_abs_amplitude(x); };
  f.singularities = std::vector<double>(state.nodes().begin(), state.nodes().end());
  return f;
}

DriftField DriftField::restoring(double rate) {
  DriftField f;
  f.velocity = [rate](double x, double) { return -rate * x; };
  f.derivative = [rate](double, double) { return -rate; };
  f.potential = [rate](double x) { return -0.5 * rate * x * x; };
  f.singularities = std::vector<double>{};
  return f;
}

DriftField DriftField::zero() {
  DriftField f;
  f.velocity = [](double, double) { return 0.0; };
  f.derivative = [](double, double) { return 0.0; };
  f.potential = [](double) { return 0.0; };
  f.singularities = std::vector<double>{};
  return f;
}

DriftField DriftField::linear(std::function<double(double)> offset,
                              std::function<double(double)> slope) {
  DriftField f;
  f.velocity = [offset, slope](double x, double t) { return offset(t) + slope(t) * x; };
  f.derivative = [slope](double, double t) { return slope(t); };
  f.singularities = std::vector<double>{};
  f.time_dependent = true;
  return f;
}

std::size_t SectorDecomposition::sector_of(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), x) -
                                  breakpoints.begin());
}

GridDensity::GridDensity(Grid1D g, std::vector<double> v, std::vector<double> breaks)
    : grid(g), values(std::move(v)), breakpoints(std::move(breaks)) {
  if (values.size() != grid.size()) throw DomainError("GridDensity: size mismatch with grid");
  std::sort(breakpoints.begin(), breakpoints.end());
  refresh_sector_masses();
}

GridDensity GridDensity::from_function(const Grid1D& g, const std::function<double(double)>& f,
                                       std::vector<double> breaks) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.x(i));
  return GridDensity(g, std::move(v), std::move(breaks));
}

GridDensity GridDensity::delta(const Grid1D& g, double x0, std::vector<double> breaks) {
  std::vector<double> v(g.size(), 0.0);
  const std::size_t j = g.nearest(x0);
  v[j] = 1.0 / g.weight(j);
  return GridDensity(g, std::move(v), std::move(breaks));
}

double GridDensity::mass() const { return trapezoid(grid, values); }

void GridDensity::refresh_sector_masses() {
  sector_masses.assign(breakpoints.size() + 1, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // A point sitting exactly on a breakpoint carries no mass for a valid
    // density; it is attributed to the left sector.
    const auto k = static_cast<std::size_t>(
        std::lower_bound(breakpoints.begin(), breakpoints.end(), grid.x(i)) - breakpoints.begin());
    sector_masses[k] += grid.weight(i) * values[i];
  }
}

void GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("GridDensity: cannot normalize");
  for (double& v : values) v /= m;
  refresh_sector_masses();
}

double trapezoid(const Grid1D& g, std::span<const double> values) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weight(i) * values[i];
  return s;
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
  if (a.grid.size() != b.grid.size()) throw DomainError("l1_distance: grid mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    s += a.grid.weight(i) * std::abs(a.values[i] - b.values[i]);
  return s;
}

double l1_distance(const GridDensity& a, const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    s += a.grid.weight(i) * std::abs(a.values[i] - f(a.grid.x(i)));
  return s;
}

double sup_distance(const GridDensity& a, const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i)
    s = std::max(s, std::abs(a.values[i] - f(a.grid.x(i))));
  return s;
}

}  // namespace nelson
