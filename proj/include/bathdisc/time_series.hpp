#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace bathdisc {

// Uniform grid t_k = k * dt, k = 0 .. count-1.
struct TimeGrid {
  double dt = 0.01;
  std::size_t count = 1;

  double t(std::size_t k) const { return static_cast<double>(k) * dt; }
  double t_end() const { return t(count - 1); }

  // Grid covering [0, t_end] with spacing dt (t_end rounded to the nearest sample).
  static TimeGrid until(double t_end, double dt);
};

bool same_grid(const TimeGrid& a, const TimeGrid& b);

// Complex function of time sampled on a TimeGrid.
struct TimeSeries {
  TimeGrid grid;
  Eigen::VectorXcd values;
};

// Real function of time sampled on a TimeGrid.
struct RealSeries {
  TimeGrid grid;
  Eigen::VectorXd values;
};

}  // namespace bathdisc
