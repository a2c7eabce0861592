#pragma once

#include "bathdisc/direct_disc.hpp"
#include "bathdisc/spectral.hpp"
#include "bathdisc/time_series.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace bathdisc {

// Inverse temperature; +infinity means T = 0.
inline constexpr double kZeroTemperature = std::numeric_limits<double>::infinity();

// alpha1(t) = int J (n+1) e^{-i w t}, alpha2(t) = int J n e^{+i w t} with the
// Bose factor n(w) = 1 / (e^{beta w} - 1), or the same as mode sums.
struct BathCorrelation {
  TimeSeries alpha1;
  TimeSeries alpha2;
  double inverse_temperature = kZeroTemperature;
  std::string source;
};

using CorrelationSource = std::variant<SpectralDensity, DiscreteBath>;

// Bose occupation; 0 at T = 0.
double bose_factor(double omega, double inverse_temperature);

// Throws ConfigError when the finite-temperature integrand is not integrable
// (support below 0, or J(0) > 0, or a Caldeira-Leggett exponent s <= 0).
BathCorrelation correlation_functions(const CorrelationSource& source, double inverse_temperature,
                                      const TimeGrid& grid, double rel_tol = 1e-12);

// Gamma(t) = int_0^t alpha_T(tau) e^{i w_s tau} dtau, alpha_T = alpha1 + conj(alpha2),
// by the cumulative trapezoidal rule on the correlation grid.
TimeSeries gamma_integral(const BathCorrelation& corr, double omega_s);

enum class CouplingOperator { SigmaMinus, SigmaX };

// Basis {|e>, |g>}: index 0 is the excited state, H_sys = omega_s |e><e|.
using DensityMatrix2 = Eigen::Matrix2cd;

struct MeOptions {
  CouplingOperator coupling = CouplingOperator::SigmaX;
  DensityMatrix2 initial = (DensityMatrix2() << 1, 0, 0, 0).finished();
  double halving_tolerance = 1e-6;
  bool check_halving = true;
};

struct MeSolution {
  TimeGrid grid;
  std::vector<DensityMatrix2> states;
  RealSeries population;  // <e|rho|e>
  RealSeries coherence;   // |<e|rho|g>|
  double halving_defect = 0.0;  // max |rho_dt - rho_dt/2| on the grid
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
};

// Correlation grid that refines the integrator grid by 8 (needed for RK4
// stages of the step-halving check).
inline constexpr int kCorrelationRefinement = 8;
TimeGrid correlation_grid(const TimeGrid& grid);

// Second-order time-local master equation integrated with fixed-step RK4.
// corr must be sampled on correlation_grid(grid).
MeSolution integrate_me(double omega_s, const BathCorrelation& corr, const TimeGrid& grid,
                        const MeOptions& options = {});

// RK4 at an explicit step; step must be grid.dt divided by 1, 2 or 4.
std::vector<DensityMatrix2> integrate_me_fixed(double omega_s, const BathCorrelation& corr,
                                               const TimeGrid& grid, int substeps,
                                               const MeOptions& options);

}  // namespace bathdisc
