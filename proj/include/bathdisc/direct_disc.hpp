#pragma once

#include "bathdisc/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bathdisc {

// Star-geometry discrete bath: modes at energies x_n with weights |V_n|^2.
struct DiscreteBath {
  Eigen::VectorXd energies;  // strictly increasing
  Eigen::VectorXd weights;   // all > 0
  std::string method_tag;
  double support_lower = 0.0;
  double support_upper = 0.0;
  std::vector<std::string> notes;  // dropped modes and other diagnostics

  Eigen::Index size() const { return energies.size(); }
  double total_weight() const { return weights.sum(); }
};

// Checks the DiscreteBath invariants; throws Error on violation.
void validate(const DiscreteBath& bath);

// a = b_0 < b_1 < ... < b_N = b.
struct IntervalPartition {
  std::vector<double> breakpoints;

  std::size_t intervals() const { return breakpoints.empty() ? 0 : breakpoints.size() - 1; }
};

// Midpoint nodes of n equal intervals, |V_n|^2 = J(x_n) dx.
DiscreteBath trapezoid_discretize(const SpectralDensity& J, int n);

// |V_n|^2 = int_{I_n} J, x_n = centroid of J over I_n. Empty intervals are dropped.
DiscreteBath interval_discretize(const SpectralDensity& J, const IntervalPartition& partition);

IntervalPartition linear_partition(double a, double b, int n);

// Geometric partition accumulating toward `accumulation` from both sides.
// Interval widths on each side shrink by the factor `ratio` toward the
// accumulation point; intervals are split between the sides in proportion to
// their lengths.
IntervalPartition log_partition(double a, double b, int n, double ratio = 2.0,
                                double accumulation = 0.0);

// Mean method: energies are spectral means of the intervals cut by the
// energies placed so far (breadth-first, left to right); weights integrate J
// over cells bounded by midpoints between neighbouring energies.
DiscreteBath mean_method(const SpectralDensity& J, int n);

// Equal-weight method: breakpoints at the k/n quantiles of the cumulative
// weight, then interval_discretize on that partition.
DiscreteBath equal_weight_method(const SpectralDensity& J, int n);

}  // namespace bathdisc
