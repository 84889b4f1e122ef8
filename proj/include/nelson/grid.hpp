#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace nelson {

class StationaryState;

/// Uniform grid lo = x_0 < ... < x_{n-1} = hi.
class Grid1D {
 public:
  static constexpr std::size_t kMinPoints = 16;

  Grid1D(double lo, double hi, std::size_t n_points);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double x(std::size_t i) const { return i + 1 == n_ ? hi_ : lo_ + h_ * static_cast<double>(i); }

  std::vector<double> points() const;
  // Trapezoid weights: h inside, h/2 at the two ends.
  std::vector<double> trapezoid_weights() const;
  double weight(std::size_t i) const { return (i == 0 || i + 1 == n_) ? 0.5 * h_ : h_; }

  // Index of the grid point nearest to x (clamped to the grid).
  std::size_t nearest(double x) const;

 private:
  double lo_;
  double hi_;
  std::size_t n_;
  double h_;
};

/// Forward velocity field v(x, t).
///
/// `singularities` holds the analytically known poles (nodes of the
/// underlying wavefunction); when absent, split_domain() detects them.
/// `potential` is a primitive W with v = dW/dx for time-independent fields;
/// when present, invariant densities use exp(W/D) directly.
struct DriftField {
  std::function<double(double, double)> velocity;
  std::function<double(double, double)> derivative;
  std::function<double(double)> potential;
  std::optional<std::vector<double>> singularities;
  bool time_dependent = false;

  double operator()(double x, double t = 0.0) const { return velocity(x, t); }

  static DriftField from_state(const StationaryState& state);
  // v = -rate * x
  static DriftField restoring(double rate);
  static DriftField zero();
  // v = offset(t) + slope(t) x
  static DriftField linear(std::function<double(double)> offset, std::function<double(double)> slope);
};

struct SectorDecomposition {
  std::vector<double> breakpoints;                 // sorted interior singularities
  std::vector<std::pair<double, double>> sectors;  // partition of [lo, hi]

  std::size_t sector_of(double x) const;
  std::size_t count() const { return sectors.size(); }
};

/// Density sampled on a grid. Sector masses use the trapezoid weights of the
/// full grid, attributing each point to the sector containing it.
struct GridDensity {
  Grid1D grid;
  std::vector<double> values;
  std::vector<double> breakpoints;
  std::vector<double> sector_masses;

  GridDensity(Grid1D g, std::vector<double> v, std::vector<double> breaks = {});

  static GridDensity from_function(const Grid1D& g, const std::function<double(double)>& f,
                                   std::vector<double> breaks = {});
  // Normalized hat on the grid point nearest to x0.
  static GridDensity delta(const Grid1D& g, double x0, std::vector<double> breaks = {});

  double mass() const;
  void refresh_sector_masses();
  void normalize();
};

double l1_distance(const GridDensity& a, const GridDensity& b);
double l1_distance(const GridDensity& a, const std::function<double(double)>& f);
double sup_distance(const GridDensity& a, const std::function<double(double)>& f);

// Trapezoid integral of samples over the grid.
double trapezoid(const Grid1D& g, std::span<const double> values);

}  // namespace nelson
