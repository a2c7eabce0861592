#include "bathdisc/sp_evolve.hpp"

#include "bathdisc/bessel.hpp"
#include "bathdisc/quadrature.hpp"
#include "bathdisc/tridiagonal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bathdisc {

namespace {

// Secular function of the arrowhead matrix, evaluated at E = poles[origin] + delta
// so that the distance to the nearest pole keeps full relative precision.
struct Secular {
  const Eigen::VectorXd& poles;
  const Eigen::VectorXd& weights;
  double eps0;

  struct Value {
    double f;
    double slope;  // 1 + sum w / d^2 > 0
  };

  Value operator()(Eigen::Index origin, double delta) const {
    double sum = 0.0;
    double slope = 1.0;
    const double xo = poles[origin];
    for (Eigen::Index j = 0; j < poles.size(); ++j) {
      const double d = (xo - poles[j]) + delta;
      const double q = weights[j] / d;
      sum += q;
      slope += q / d;
    }
    return {(xo - eps0) + delta - sum, slope};
  }

  // Root in (lo, hi) of the increasing function delta -> f, safeguarded Newton.
  std::pair<double, double> solve(Eigen::Index origin, double lo, double hi) const {
    double delta = 0.5 * (lo + hi);
    Value v = (*this)(origin, delta);
    for (int iter = 0; iter < 300; ++iter) {
      if (v.f == 0.0) break;
      if (v.f < 0.0) {
        lo = delta;
      } else {
        hi = delta;
      }
      double next = delta - v.f / v.slope;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const bool done = std::abs(next - delta) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                                       std::max(std::abs(next), std::abs(delta));
      delta = next;
      v = (*this)(origin, delta);
      if (done || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(delta)) break;
    }
    return {delta, 1.0 / v.slope};
  }
};

SystemSpectrum secular_spectrum(double eps0, const DiscreteBath& bath) {
  const Eigen::VectorXd& x = bath.energies;
  const Eigen::VectorXd& w = bath.weights;
  const Eigen::Index n = x.size();
  const Secular sec{x, w, eps0};
  SystemSpectrum out;
  out.energies.resize(n + 1);
  out.overlaps.resize(n + 1);
  const double spread = std::sqrt(w.sum()) + 1.0;

  // Below the lowest pole.
  {
    double lo = std::min(eps0 - x[0], 0.0) - spread;
    while (sec(0, lo).f >= 0.0) lo *= 2.0;
    const auto [delta, ov] = sec.solve(0, lo, 0.0);
    out.energies[0] = x[0] + delta;
    out.overlaps[0] = ov;
  }
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    const double gap = x[k + 1] - x[k];
    if (sec(k, 0.5 * gap).f > 0.0) {
      const auto [delta, ov] = sec.solve(k, 0.0, 0.5 * gap);
      out.energies[k + 1] = x[k] + delta;
      out.overlaps[k + 1] = ov;
    } else {
      const auto [delta, ov] = sec.solve(k + 1, -0.5 * gap, 0.0);
      out.energies[k + 1] = x[k + 1] + delta;
      out.overlaps[k + 1] = ov;
    }
  }
  {
    double hi = std::max(eps0 - x[n - 1], 0.0) + spread;
    while (sec(n - 1, hi).f <= 0.0) hi *= 2.0;
    const auto [delta, ov] = sec.solve(n - 1, 0.0, hi);
    out.energies[n] = x[n - 1] + delta;
    out.overlaps[n] = ov;
  }
  return out;
}

SystemSpectrum dense_spectrum(const Eigen::MatrixXd& h) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
  SystemSpectrum out;
  out.energies = solver.eigenvalues();
  out.overlaps = solver.eigenvectors().row(0).transpose().cwiseAbs2();
  return out;
}

SystemSpectrum chain_spectrum(double eps0, const ChainCoefficients& chain) {
  std::vector<double> diag{eps0};
  std::vector<double> off{chain.v_tot};
  diag.insert(diag.end(), chain.alphas.data(), chain.alphas.data() + chain.alphas.size());
  for (Eigen::Index i = 0; i < chain.betas.size(); ++i) off.push_back(std::sqrt(chain.betas[i]));
  const auto spec = tridiagonal_first_row<double>(std::move(diag), std::move(off));
  SystemSpectrum out;
  out.energies = Eigen::Map<const Eigen::VectorXd>(spec.eigenvalues.data(),
                                                   static_cast<Eigen::Index>(spec.eigenvalues.size()));
  out.overlaps = Eigen::Map<const Eigen::VectorXd>(
      spec.first_components.data(), static_cast<Eigen::Index>(spec.first_components.size()));
  return out;
}

// Index of the first run of kDebounceSamples samples satisfying pred, or -1.
template <typename Pred>
long first_sustained(std::size_t count, Pred pred) {
  int run = 0;
  for (std::size_t k = 0; k < count; ++k) {
    run = pred(k) ? run + 1 : 0;
    if (run == kDebounceSamples) return static_cast<long>(k) - (kDebounceSamples - 1);
  }
  return -1;
}

SystemSpectrum spectrum_of_bath(const SpectralDensity& J, double eps0, int n) {
  if (!(total_weight(J) > 0.0)) return system_spectrum(SingleParticleModel::isolated(eps0));
  return system_spectrum(
      SingleParticleModel{eps0, interval_discretize(J, linear_partition(J.lower(), J.upper(), n))});
}

}  // namespace

Eigen::Index SingleParticleModel::bath_size() const {
  return std::visit(
      [](const auto& b) -> Eigen::Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, DiscreteBath>) {
          return b.size();
        } else {
          return b.length();
        }
      },
      bath);
}

SingleParticleModel SingleParticleModel::isolated(double eps0) {
  return SingleParticleModel{eps0, ChainCoefficients{}};
}

Eigen::MatrixXd build_single_particle_matrix(const SingleParticleModel& model) {
  const Eigen::Index n = model.bath_size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
  h(0, 0) = model.eps0;
  if (n == 0) return h;
  if (const auto* star = std::get_if<DiscreteBath>(&model.bath)) {
    for (Eigen::Index i = 0; i < n; ++i) {
      h(i + 1, i + 1) = star->energies[i];
      h(0, i + 1) = h(i + 1, 0) = std::sqrt(star->weights[i]);
    }
  } else {
    const auto& chain = std::get<ChainCoefficients>(model.bath);
    h(0, 1) = h(1, 0) = chain.v_tot;
    for (Eigen::Index i = 0; i < n; ++i) h(i + 1, i + 1) = chain.alphas[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      h(i + 1, i + 2) = h(i + 2, i + 1) = std::sqrt(chain.betas[i]);
    }
  }
  return h;
}

SystemSpectrum system_spectrum(const SingleParticleModel& model) {
  const Eigen::Index n = model.bath_size();
  if (n == 0) {
    return SystemSpectrum{Eigen::VectorXd::Constant(1, model.eps0), Eigen::VectorXd::Ones(1)};
  }
  if (const auto* star = std::get_if<DiscreteBath>(&model.bath)) {
    validate(*star);
    if (n > kDenseStarLimit) return secular_spectrum(model.eps0, *star);
    return dense_spectrum(build_single_particle_matrix(model));
  }
  return chain_spectrum(model.eps0, std::get<ChainCoefficients>(model.bath));
}

TimeSeries greens_function(const SystemSpectrum& spectrum, const TimeGrid& grid) {
  NodeRule rule;
  rule.nodes.assign(spectrum.energies.data(), spectrum.energies.data() + spectrum.energies.size());
  rule.coefficients.assign(spectrum.overlaps.data(),
                           spectrum.overlaps.data() + spectrum.overlaps.size());
  return TimeSeries{grid, std::complex<double>(0.0, -1.0) * fourier_sum(rule, grid)};
}

TimeSeries greens_function(const SingleParticleModel& model, const TimeGrid& grid) {
  return greens_function(system_spectrum(model), grid);
}

TimeSeries particle_overlap(const SystemSpectrum& spectrum, const TimeGrid& grid, double fermi) {
  NodeRule rule;
  for (Eigen::Index i = 0; i < spectrum.energies.size(); ++i) {
    if (spectrum.energies[i] > fermi - 1e-10) {
      rule.nodes.push_back(spectrum.energies[i]);
      rule.coefficients.push_back(spectrum.overlaps[i]);
    }
  }
  return TimeSeries{grid, fourier_sum(rule, grid)};
}

RealSeries population(const TimeSeries& greens) {
  return RealSeries{greens.grid, greens.values.cwiseAbs2()};
}

RealSeries population(const SingleParticleModel& model, const TimeGrid& grid) {
  return population(greens_function(model, grid));
}

TimeSeries lambda_time_discrete(const DiscreteBath& bath, const TimeGrid& grid) {
  NodeRule rule;
  rule.nodes.assign(bath.energies.data(), bath.energies.data() + bath.energies.size());
  rule.coefficients.assign(bath.weights.data(), bath.weights.data() + bath.weights.size());
  return TimeSeries{grid, fourier_sum(rule, grid)};
}

RealSeries error_series(const TimeSeries& reference, const TimeSeries& approx) {
  if (!same_grid(reference.grid, approx.grid)) throw ConfigError("error_series: grid mismatch");
  return RealSeries{reference.grid, (reference.values - approx.values).cwiseAbs()};
}

RealSeries error_series(const RealSeries& reference, const RealSeries& approx) {
  if (!same_grid(reference.grid, approx.grid)) throw ConfigError("error_series: grid mismatch");
  return RealSeries{reference.grid, (reference.values - approx.values).cwiseAbs()};
}

double tmax_predict(int n_b, double a, double b, TmaxKind kind) {
  if (n_b < 1) throw ConfigError("tmax_predict needs N_b >= 1");
  if (!(b > a)) throw ConfigError("tmax_predict needs b > a");
  const int degree = kind == TmaxKind::Bath ? 2 * n_b - 1 : 2 * n_b + 1;
  return 2.0 * degree / (b - a);
}

double tmax_empirical(const RealSeries& err, double threshold) {
  const auto& v = err.values;
  const long k = first_sustained(static_cast<std::size_t>(v.size()),
                                 [&](std::size_t i) { return v[static_cast<Eigen::Index>(i)] > threshold; });
  return k < 0 ? kNeverExceeded : err.grid.t(static_cast<std::size_t>(k));
}

double tmax_relative(const RealSeries& err, double factor, double floor) {
  const auto& v = err.values;
  std::vector<double> running(static_cast<std::size_t>(v.size()));
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    m = std::max(m, v[i]);
    running[static_cast<std::size_t>(i)] = m;
  }
  const long k = first_sustained(running.size(), [&](std::size_t i) {
    return v[static_cast<Eigen::Index>(i)] > factor * std::max(running[i / 2], floor);
  });
  return k < 0 ? kNeverExceeded : err.grid.t(static_cast<std::size_t>(k));
}

double chebyshev_remainder(int n, double t, double a, double b) {
  if (n < 0) throw ConfigError("chebyshev_remainder needs n >= 0");
  if (!(b > a)) throw ConfigError("chebyshev_remainder needs b > a");
  return 2.0 / (b - a) * std::abs(bessel_j(n, 0.5 * (b - a) * t));
}

TimeGrid default_grid(const SystemSpectrum& spectrum, double t_end) {
  const double emax = spectrum.energies.cwiseAbs().maxCoeff();
  const double dt = emax > 0.0 ? std::min(0.01, std::numbers::pi / (10.0 * emax)) : 0.01;
  return TimeGrid::until(t_end, dt);
}

ReferenceSolution reference_solution(const SpectralDensity& J, double eps0, const TimeGrid& grid,
                                     int n_ref) {
  if (n_ref < 1000) throw ConfigError("reference_solution needs N_ref >= 1000");
  ReferenceSolution ref;
  ref.n_ref = n_ref;
  ref.greens = greens_function(spectrum_of_bath(J, eps0, n_ref), grid);
  ref.population = population(ref.greens);
  const RealSeries coarse = population(greens_function(spectrum_of_bath(J, eps0, n_ref / 2), grid));
  ref.certified_defect = (ref.population.values - coarse.values).cwiseAbs().maxCoeff();
  if (!(ref.certified_defect < kReferenceTolerance)) {
    throw NumericalError("quasi-continuum reference not converged; increase N_ref",
                         ref.certified_defect);
  }
  return ref;
}

}  // namespace bathdisc
