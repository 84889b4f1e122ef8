#pragma once

namespace nelson {

struct EvalResult {
  double value = 0.0;
  double est_abs_error = 0.0;
};

inline constexpr int kMaxHermiteOrder = 64;

/// Physicists' Hermite polynomial H_n(x) by upward three-term recurrence.
/// Throws DomainError for n < 0 or n > kMaxHermiteOrder.
double hermite(int n, double x);

/// Kummer's confluent hypergeometric function M(a, b; z) = 1F1(a; b; z).
///
/// Plain power series with a relative stopping threshold of 1e-17 and a
/// 500-term cap. For z < 0 the series is summed after Kummer's transformation
/// M(a,b;z) = e^z M(b-a,b;-z) so that terms do not alternate, unless `a` is a
/// non-positive integer (then the polynomial is evaluated directly).
///
/// Throws DomainError when b is a non-positive integer and AccuracyError
/// (carrying the partial sum) when the cap is hit before convergence.
EvalResult kummer_m(double a, double b, double z);

}  // namespace nelson
