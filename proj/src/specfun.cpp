#include "nelson/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nelson/errors.hpp"

namespace nelson {

namespace {

constexpr int kKummerTermCap = 500;
constexpr double kKummerStopRatio = 1e-17;

bool is_nonpositive_integer(double v) { return v <= 0.0 && std::floor(v) == v; }

struct SeriesSum {
  double value;
  double abs_sum;
  double tail;
};

SeriesSum kummer_series(double a, double b, double z) {
  double sum = 1.0;
  double term = 1.0;
  double abs_sum = 1.0;
  for (int k = 0; k < kKummerTermCap; ++k) {
    term *= (a + k) / (b + k) * z / (k + 1);
    sum += term;
    abs_sum += std::abs(term);
    if (term == 0.0) {
      return {sum, abs_sum, 0.0};  // terminating polynomial
    }
    // Only stop once the remaining terms shrink geometrically; near a + k ~ 0
    // a single term can be tiny while later ones grow again.
    const double next_ratio = std::abs((a + k + 1) / (b + k + 1) * z / (k + 2));
    if (next_ratio < 0.5 && std::abs(term) < kKummerStopRatio * std::abs(sum)) {
      return {sum, abs_sum, std::abs(term) * next_ratio / (1.0 - next_ratio)};
    }
  }
  throw AccuracyError("kummer_m: series did not converge within " +
                          std::to_string(kKummerTermCap) + " terms",
                      sum);
}

}  // namespace

double hermite(int n, double x) {
  if (n < 0 || n > kMaxHermiteOrder) {
    throw DomainError("hermite: order " + std::to_string(n) + " outside [0, " +
                      std::to_string(kMaxHermiteOrder) + "]");
  }
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

EvalResult kummer_m(double a, double b, double z) {
  if (is_nonpositive_integer(b)) {
    throw DomainError("kummer_m: b = " + std::to_string(b) + " is a non-positive integer");
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();

  if (z < 0.0 && !is_nonpositive_integer(a)) {
    const SeriesSum s = kummer_series(b - a, b, -z);
    const double scale = std::exp(z);
    return {scale * s.value, scale * (4.0 * eps * s.abs_sum + s.tail) +
                                 4.0 * eps * std::abs(scale * s.value)};
  }
  const SeriesSum s = kummer_series(a, b, z);
  return {s.value, 4.0 * eps * s.abs_sum + s.tail};
}

}  // namespace nelson
