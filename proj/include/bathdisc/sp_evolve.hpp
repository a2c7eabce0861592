#pragma once

#include "bathdisc/direct_disc.hpp"
#include "bathdisc/ortho_quad.hpp"
#include "bathdisc/spectral.hpp"
#include "bathdisc/time_series.hpp"

#include <Eigen/Dense>

#include <limits>
#include <variant>

namespace bathdisc {

enum class Geometry { Star, Chain };

// Single level eps0 coupled to a star bath or to the head of a chain.
struct SingleParticleModel {
  double eps0 = 0.0;
  std::variant<DiscreteBath, ChainCoefficients> bath;

  Geometry geometry() const {
    return std::holds_alternative<DiscreteBath>(bath) ? Geometry::Star : Geometry::Chain;
  }
  // Number of bath sites (0 for an isolated level).
  Eigen::Index bath_size() const;

  static SingleParticleModel isolated(double eps0);
};

// (N_b+1)x(N_b+1) Hermitian matrix with the system on index 0. Star: diagonal
// (eps0, x_n) and first-row couplings sqrt(weight_n). Chain: tridiagonal with
// eps0, v_tot, then the chain coefficients.
Eigen::MatrixXd build_single_particle_matrix(const SingleParticleModel& model);

// Eigenvalues of the model matrix and squared overlaps with the system site.
struct SystemSpectrum {
  Eigen::VectorXd energies;  // ascending
  Eigen::VectorXd overlaps;  // |<psi0|E_n>|^2, sum to 1
};

// Star baths larger than this are diagonalized through the secular equation of
// the arrowhead matrix instead of a dense solver.
inline constexpr Eigen::Index kDenseStarLimit = 256;

SystemSpectrum system_spectrum(const SingleParticleModel& model);

// G(t) = -i sum_n |<psi0|E_n>|^2 exp(-i E_n t).
TimeSeries greens_function(const SystemSpectrum& spectrum, const TimeGrid& grid);
TimeSeries greens_function(const SingleParticleModel& model, const TimeGrid& grid);

// Particle part of the overlap for a filled Fermi sea: iG(t) restricted to
// eigenstates with E_n > fermi - 1e-10 (states at the Fermi level count as empty).
TimeSeries particle_overlap(const SystemSpectrum& spectrum, const TimeGrid& grid,
                            double fermi = 0.0);

// P(t) = |i G(t)|^2.
RealSeries population(const TimeSeries& greens);
RealSeries population(const SingleParticleModel& model, const TimeGrid& grid);

// Lambda^discr(t) = sum_n |V_n|^2 exp(-i x_n t).
TimeSeries lambda_time_discrete(const DiscreteBath& bath, const TimeGrid& grid);

// Pointwise |reference - approx|; throws ConfigError on grid mismatch.
RealSeries error_series(const TimeSeries& reference, const TimeSeries& approx);
RealSeries error_series(const RealSeries& reference, const RealSeries& approx);

enum class TmaxKind { Bath, System };

// Bath: 2(2N_b-1)/(b-a). System: 2(2N_b+1)/(b-a).
double tmax_predict(int n_b, double a, double b, TmaxKind kind);

inline constexpr double kNeverExceeded = std::numeric_limits<double>::infinity();
inline constexpr int kDebounceSamples = 3;

// First t where err exceeds the threshold for kDebounceSamples consecutive
// samples; kNeverExceeded otherwise.
double tmax_empirical(const RealSeries& err, double threshold);

// First t where err exceeds factor * max(max err over [0, t/2], floor) for
// kDebounceSamples consecutive samples.
double tmax_relative(const RealSeries& err, double factor = 100.0, double floor = 1e-12);

// (2/(b-a)) |J_n((b-a) t / 2)|.
double chebyshev_remainder(int n, double t, double a, double b);

// Uniform grid on [0, t_end] with dt = min(0.01, pi / (10 max|E_n|)).
TimeGrid default_grid(const SystemSpectrum& spectrum, double t_end);

struct ReferenceSolution {
  TimeSeries greens;
  RealSeries population;
  int n_ref = 0;
  double certified_defect = 0.0;  // max |P_{N_ref} - P_{N_ref/2}|
};

inline constexpr double kReferenceTolerance = 1e-6;

// Quasi-continuum reference from a linear interval-average bath with n_ref
// modes, certified against an n_ref/2 run.
ReferenceSolution reference_solution(const SpectralDensity& J, double eps0, const TimeGrid& grid,
                                     int n_ref);

}  // namespace bathdisc
