#pragma once

#include "bathdisc/error.hpp"
#include "bathdisc/time_series.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace bathdisc {

// J(x) = alpha x^s omega_c^(1-s) exp(-x/omega_c) on [0, omega_max].
struct CaldeiraLeggett {
  double alpha;
  double s;
  double omega_c;
  double omega_max;
};

// Sum of unit-height Gaussians exp(-(x-c)^2 / (2 eta^2)) restricted to [a, b].
struct GaussianMix {
  std::vector<double> centers;
  double eta;
};

struct Flat {
  double height;
};

// Piecewise-linear interpolation of (grid, values).
struct Tabulated {
  std::vector<double> grid;
  std::vector<double> values;
};

using DensityFamily = std::variant<CaldeiraLeggett, GaussianMix, Flat, Tabulated>;

// Continuous bath spectral density J(x) >= 0 with finite support [a, b].
//
// Construction validates the family parameters; evaluation never throws and
// returns 0 outside the support. Evaluation is templated so the same density
// can feed double and extended-precision quadratures.
class SpectralDensity {
 public:
  static SpectralDensity caldeira_leggett(double alpha, double s, double omega_c, double omega_max);
  static SpectralDensity gaussian_mix(std::vector<double> centers, double eta, double a, double b);
  static SpectralDensity flat(double height, double a, double b);
  static SpectralDensity tabulated(std::vector<double> grid, std::vector<double> values);

  template <typename Real>
  Real operator()(const Real& x) const;

  double lower() const { return a_; }
  double upper() const { return b_; }
  double width() const { return b_ - a_; }
  const DensityFamily& family() const { return family_; }

  // Support endpoints plus interior points where J is not smooth.
  std::vector<double> breakpoints() const;

  // Points where J has an algebraic (non-analytic) endpoint behaviour, such as
  // x^s with non-integer s. Quadratures grade their panels toward them.
  std::vector<double> singular_points() const;

  // Mass of the family beyond the support cut (Caldeira-Leggett only, else 0).
  double truncated_tail_mass() const;

  std::string describe() const;

 private:
  SpectralDensity(DensityFamily family, double a, double b)
      : family_(std::move(family)), a_(a), b_(b) {}

  DensityFamily family_;
  double a_;
  double b_;
};

template <typename Real>
Real SpectralDensity::operator()(const Real& x) const {
  using std::exp;
  using std::pow;
  if (x < Real(a_) || x > Real(b_)) return Real(0);
  return std::visit(
      [&](const auto& f) -> Real {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, CaldeiraLeggett>) {
          if (x <= Real(0)) return f.s == 0.0 ? Real(f.alpha * f.omega_c) : Real(0);
          return Real(f.alpha) * pow(x, Real(f.s)) * pow(Real(f.omega_c), Real(1 - f.s)) *
                 exp(-x / Real(f.omega_c));
        } else if constexpr (std::is_same_v<F, GaussianMix>) {
          Real sum = 0;
          const Real two_eta2 = Real(2) * Real(f.eta) * Real(f.eta);
          for (double c : f.centers) {
            const Real d = x - Real(c);
            sum += exp(-d * d / two_eta2);
          }
          return sum;
        } else if constexpr (std::is_same_v<F, Flat>) {
          return Real(f.height);
        } else {
          const auto& g = f.grid;
          std::size_t hi = 1;
          while (hi + 1 < g.size() && x > Real(g[hi])) ++hi;
          const Real x0 = Real(g[hi - 1]);
          const Real x1 = Real(g[hi]);
          const Real frac = (x - x0) / (x1 - x0);
          return Real(f.values[hi - 1]) + frac * (Real(f.values[hi]) - Real(f.values[hi - 1]));
        }
      },
      family_);
}

using ComplexEnergy = std::complex<double>;

double eval_density(const SpectralDensity& J, double x);

// |V_tot|^2 = int_a^b J(x) dx to relative tolerance 1e-12.
double total_weight(const SpectralDensity& J);

// First moment int x J(x) dx over [lo, hi] together with the mass over [lo, hi].
struct IntervalMoments {
  double mass;
  double first;
};
IntervalMoments interval_moments(const SpectralDensity& J, double lo, double hi);

// int_lo^hi J(x) dx.
double interval_weight(const SpectralDensity& J, double lo, double hi);

// Lambda(z) = int J(x) / (z - x) dx to relative tolerance 1e-10.
// Throws ConfigError for z on the real axis inside the support.
std::complex<double> hybridization(const SpectralDensity& J, ComplexEnergy z);

// -(1/pi) Im Lambda(x + i eta).
double broadened_density(const SpectralDensity& J, double x, double eta);

// Lambda(t) = int J(x) exp(-i x t) dx on the grid.
TimeSeries lambda_time(const SpectralDensity& J, const TimeGrid& grid, double rel_tol = 1e-12);

// Sign in front of Lambda in the system Green's function denominator.
// Plus reproduces the formula as it is usually printed for this construction;
// the retarded-propagator convention of most of the literature is Minus.
enum class HybridizationSign { Plus, Minus };

// 1 / (x + i eta - eps0 + sigma Lambda(x + i eta)).
std::complex<double> system_greens_real_axis(const SpectralDensity& J, double eps0, double x,
                                             double eta,
                                             HybridizationSign sign = HybridizationSign::Plus);

// Two-column text "x value"; '#' starts a comment.
SpectralDensity read_tabulated(const std::string& path);

}  // namespace bathdisc
