#include "bathdisc/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace bathdisc {

TimeGrid TimeGrid::until(double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time grid needs dt > 0");
  if (!(t_end >= 0.0)) throw ConfigError("time grid needs t_end >= 0");
  TimeGrid g;
  g.dt = dt;
  g.count = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  return g;
}

bool same_grid(const TimeGrid& a, const TimeGrid& b) {
  return a.count == b.count && std::abs(a.dt - b.dt) <= 1e-14 * std::max(a.dt, b.dt);
}

namespace {

NodeRule rule_from_panels(const std::function<double(double)>& f,
                          const std::vector<Panel>& panels, double max_width) {
  const auto& gl = gauss_legendre<double>(kPanelOrder);
  NodeRule rule;
  for (const Panel& p : panels) {
    const double width = p.hi - p.lo;
    int pieces = 1;
    if (std::isfinite(max_width) && width > max_width) {
      pieces = static_cast<int>(std::ceil(width / max_width));
    }
    const double h = width / pieces;
    for (int j = 0; j < pieces; ++j) {
      const double lo = p.lo + j * h;
      const double hi = (j + 1 == pieces) ? p.hi : lo + h;
      const double half = 0.5 * (hi - lo);
      const double mid = 0.5 * (hi + lo);
      for (int i = 0; i < kPanelOrder; ++i) {
        const double x = mid + half * gl.nodes[i];
        const double c = half * gl.weights[i] * f(x);
        if (c == 0.0) continue;
        rule.nodes.push_back(x);
        rule.coefficients.push_back(c);
      }
    }
  }
  return rule;
}

}  // namespace

NodeRule build_fourier_rule(const std::function<double(double)>& f,
                            std::span<const double> breakpoints, double t_max,
                            double rel_tol) {
  const auto envelope =
      integrate_adaptive<double>(f, breakpoints, std::min(1e-14, 0.01 * rel_tol), 0.0, 40000);
  double max_width = t_max > 0.0 ? std::numbers::pi / (4.0 * t_max)
                                 : std::numeric_limits<double>::infinity();
  double mass = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    NodeRule rule = rule_from_panels(f, envelope.panels, max_width);
    if (t_max <= 0.0) return rule;
    const double finer_width =
        std::isfinite(max_width) ? 0.5 * max_width : std::numeric_limits<double>::infinity();
    NodeRule finer = rule_from_panels(f, envelope.panels, finer_width);
    mass = 0.0;
    for (double c : rule.coefficients) mass += std::abs(c);
    const double diff = std::abs(fourier_sum(rule, t_max) - fourier_sum(finer, t_max));
    if (diff <= rel_tol * mass) return rule;
    max_width *= 0.5;
  }
  throw NumericalError("oscillatory quadrature did not reach tolerance", rel_tol);
}

std::complex<double> fourier_sum(const NodeRule& rule, double t) {
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.coefficients[i] * std::polar(1.0, -rule.nodes[i] * t);
  }
  return sum;
}

Eigen::VectorXcd fourier_sum(const NodeRule& rule, const TimeGrid& grid) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.count));
  constexpr std::size_t kReseed = 256;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double c = rule.coefficients[i];
    const std::complex<double> step = std::polar(1.0, -x * grid.dt);
    std::complex<double> phase = 1.0;
    for (std::size_t k = 0; k < grid.count; ++k) {
      if (k % kReseed == 0) phase = std::polar(1.0, -x * grid.t(k));
      out[static_cast<Eigen::Index>(k)] += c * phase;
      phase *= step;
    }
  }
  return out;
}

}  // namespace bathdisc
