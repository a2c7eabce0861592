#include "bathdisc/bessel.hpp"

#include "bathdisc/error.hpp"

#include <cmath>

namespace bathdisc {

double bessel_j(int n, double x) {
  if (n < 0) throw ConfigError("bessel_j: order must be >= 0");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double sign = (x < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
  const double ax = std::abs(x);

  // Start well above both n and x so the seeded minimal solution dominates.
  const double top = std::max(static_cast<double>(n), ax);
  int m = static_cast<int>(top + 30.0 + 3.0 * std::sqrt(top));
  m += m % 2;

  constexpr double kBig = 1e250;
  double next = 0.0;     // J_{k+1}
  double current = 1e-300;  // J_k, arbitrary seed
  double norm = 0.0;
  double result = 0.0;
  for (int k = m; k > 0; --k) {
    const double prev = 2.0 * k / ax * current - next;  // J_{k-1}
    next = current;
    current = prev;
    if (std::abs(current) > kBig) {
      current /= kBig;
      next /= kBig;
      norm /= kBig;
      result /= kBig;
    }
    if (k - 1 == n) result = current;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * current;
  }
  norm += current;  // J_0
  return sign * result / norm;
}

double bessel_j_series(int n, double x) {
  if (n < 0) throw ConfigError("bessel_j_series: order must be >= 0");
  const long double half = 0.5L * x;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= half / k;  // (x/2)^n / n!
  long double sum = term;
  const long double q = -half * half;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::abs(term) <= 1e-21L * std::abs(sum)) break;
  }
  return static_cast<double>(sum);
}

}  // namespace bathdisc
