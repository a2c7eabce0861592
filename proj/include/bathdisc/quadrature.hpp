#pragma once

#include "bathdisc/error.hpp"
#include "bathdisc/time_series.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

namespace bathdisc {

// Gauss-Legendre rule on [-1, 1].
template <typename Real>
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

// n-point Gauss-Legendre rule by Newton iteration on the Legendre recurrence,
// converged to the working precision of Real. Nodes ascending.
template <typename Real>
GaussRule<Real> compute_gauss_legendre(int n) {
  using std::abs;
  using std::cos;
  GaussRule<Real> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Real pi = boost::math::constants::pi<Real>();
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = cos(pi * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
    Real dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1;
      Real p1 = x;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((Real(2 * k - 1)) * x * p1 - Real(k - 1) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1;
      }
      dp = Real(n) * (x * p1 - p0) / (x * x - Real(1));
      const Real step = p1 / dp;
      x -= step;
      if (abs(step) <= 4 * eps * abs(x) + eps * eps) break;
    }
    // Recompute the derivative at the converged node for the weight.
    {
      Real p0 = 1;
      Real p1 = x;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((Real(2 * k - 1)) * x * p1 - Real(k - 1) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1, p1 = x;
      dp = Real(n) * (x * p1 - p0) / (x * x - Real(1));
    }
    const Real w = Real(2) / ((Real(1) - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  return rule;
}

// Cached rule for the given order.
template <typename Real>
const GaussRule<Real>& gauss_legendre(int n) {
  static thread_local std::vector<GaussRule<Real>> cache;
  if (static_cast<int>(cache.size()) <= n) cache.resize(n + 1);
  if (cache[n].nodes.empty()) cache[n] = compute_gauss_legendre<Real>(n);
  return cache[n];
}

inline constexpr int kPanelOrder = 32;

// Integral of f over [lo, hi] with the 32-point rule.
template <typename T, typename F>
T gauss_panel(const F& f, double lo, double hi) {
  const auto& rule = gauss_legendre<double>(kPanelOrder);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  T sum{};
  for (int i = 0; i < kPanelOrder; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

struct Panel {
  double lo;
  double hi;
};

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  std::vector<Panel> panels;
};

// Globally adaptive composite Gauss-Legendre integration.
//
// Each panel's error is estimated as |Q(panel) - Q(left) - Q(right)| with the
// 32-point rule; the panel with the largest estimate is bisected until the
// total estimate falls below max(abs_tol, rel_tol * |I|). The initial panels
// are the pieces between consecutive breakpoints, so kinks of the integrand
// should be listed there.
template <typename T, typename F>
QuadratureResult<T> integrate_adaptive(const F& f, std::span<const double> breakpoints,
                                       double rel_tol, double abs_tol = 0.0,
                                       int max_panels = 20000) {
  struct Entry {
    Panel panel;
    T coarse;
    T fine_left;
    T fine_right;
    double error;
    bool operator<(const Entry& o) const { return error < o.error; }
  };
  auto make = [&](double lo, double hi, const T& coarse) {
    const double mid = 0.5 * (lo + hi);
    Entry e{{lo, hi}, coarse, gauss_panel<T>(f, lo, mid), gauss_panel<T>(f, mid, hi), 0.0};
    e.error = std::abs(e.fine_left + e.fine_right - coarse);
    return e;
  };

  std::priority_queue<Entry> queue;
  T total{};
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    if (!(hi > lo)) continue;
    Entry e = make(lo, hi, gauss_panel<T>(f, lo, hi));
    total += e.fine_left + e.fine_right;
    total_error += e.error;
    queue.push(e);
  }
  auto done = [&] { return total_error <= std::max(abs_tol, rel_tol * std::abs(total)); };
  while (!queue.empty() && !done()) {
    if (static_cast<int>(queue.size()) >= max_panels) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge within " << max_panels
          << " panels (achieved error " << total_error << ")";
      throw NumericalError(msg.str(), total_error);
    }
    Entry worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.panel.lo + worst.panel.hi);
    if (!(mid > worst.panel.lo && mid < worst.panel.hi)) {
      // Panel cannot be bisected in double; its estimate is as good as it gets.
      total_error -= worst.error;
      worst.error = 0.0;
      queue.push(worst);
      continue;
    }
    Entry left = make(worst.panel.lo, mid, worst.fine_left);
    Entry right = make(mid, worst.panel.hi, worst.fine_right);
    total += left.fine_left + left.fine_right + right.fine_left + right.fine_right -
             worst.fine_left - worst.fine_right;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }

  QuadratureResult<T> result;
  // Re-sum from the final panel list to avoid drift from incremental updates.
  result.value = T{};
  result.error = 0.0;
  while (!queue.empty()) {
    const Entry& e = queue.top();
    result.value += e.fine_left + e.fine_right;
    result.error += e.error;
    result.panels.push_back(e.panel);
    queue.pop();
  }
  std::sort(result.panels.begin(), result.panels.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  return result;
}

// Fixed nodes with integrand-weighted coefficients: sum_i c_i g(x_i) ~ int f(x) g(x) dx.
struct NodeRule {
  std::vector<double> nodes;
  std::vector<double> coefficients;
};

// Rule for Fourier integrals int f(x) exp(-i x t) dx with 0 <= t <= t_max.
//
// Panels come from adaptive integration of the envelope f and are then split to
// width <= pi / (4 t_max), so each panel sees at most 1/8 of an oscillation
// period. The rule is checked against a twice-refined copy at t_max.
NodeRule build_fourier_rule(const std::function<double(double)>& f,
                            std::span<const double> breakpoints, double t_max,
                            double rel_tol);

// Evaluates sum_i c_i exp(-i x_i t) on every point of the grid.
Eigen::VectorXcd fourier_sum(const NodeRule& rule, const TimeGrid& grid);

std::complex<double> fourier_sum(const NodeRule& rule, double t);

}  // namespace bathdisc
