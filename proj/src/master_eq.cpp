#include "bathdisc/master_eq.hpp"

#include "bathdisc/quadrature.hpp"

#include <cmath>
#include <complex>

namespace bathdisc {

namespace {

using Complex = std::complex<double>;

bool zero_temperature(double beta) { return std::isinf(beta) && beta > 0.0; }

void check_inverse_temperature(double beta) {
  if (!(beta > 0.0)) throw ConfigError("inverse temperature must be > 0 (use infinity for T=0)");
}

void check_thermal_density(const SpectralDensity& J) {
  if (J.lower() < 0.0) {
    throw ConfigError("finite temperature needs a bosonic density supported on [0, inf)");
  }
  if (const auto* cl = std::get_if<CaldeiraLeggett>(&J.family()); cl && cl->s <= 0.0) {
    throw ConfigError("finite temperature needs s > 0: J n(w) diverges non-integrably at w=0");
  }
  if (J.lower() == 0.0 && J(0.0) > 0.0) {
    throw ConfigError("finite temperature needs J(0) = 0: J n(w) diverges non-integrably at w=0");
  }
}

// Running integral of f sampled with spacing h, fourth order:
// interior intervals use (-f[j-1] + 13 f[j] + 13 f[j+1] - f[j+2]) h / 24,
// the end intervals the matching one-sided four-point weights.
Eigen::VectorXcd cumulative_fourth_order(const Eigen::VectorXcd& f, double h) {
  const Eigen::Index n = f.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  if (n < 2) return out;
  if (n < 4) {
    for (Eigen::Index j = 0; j + 1 < n; ++j) out[j + 1] = out[j] + 0.5 * h * (f[j] + f[j + 1]);
    return out;
  }
  const double c = h / 24.0;
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    Complex piece;
    if (j == 0) {
      piece = 9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3];
    } else if (j + 2 >= n) {
      piece = 9.0 * f[j + 1] + 19.0 * f[j] - 5.0 * f[j - 1] + f[j - 2];
    } else {
      piece = -f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2];
    }
    out[j + 1] = out[j] + c * piece;
  }
  return out;
}

// Kernel operators at every correlation-grid time:
// C(t) = int_0^t alpha1(s) d(-s) ds and B(t) = int_0^t alpha2(s) d^dag(-s) ds.
struct Kernels {
  std::vector<Eigen::Matrix2cd> c;
  std::vector<Eigen::Matrix2cd> b;
};

const Eigen::Matrix2cd kSigmaMinus = (Eigen::Matrix2cd() << 0, 0, 1, 0).finished();
const Eigen::Matrix2cd kSigmaPlus = (Eigen::Matrix2cd() << 0, 1, 0, 0).finished();

Kernels build_kernels(double omega_s, const BathCorrelation& corr, CouplingOperator coupling) {
  const TimeGrid& g = corr.alpha1.grid;
  const auto n = static_cast<Eigen::Index>(g.count);
  Eigen::VectorXcd f1p(n), f1m(n), f2p(n), f2m(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double s = g.t(static_cast<std::size_t>(k));
    const Complex down = std::polar(1.0, -omega_s * s);  // phase of sigma+ in d(-s)
    const Complex up = std::conj(down);                  // phase of sigma- in d(-s)
    f1p[k] = corr.alpha1.values[k] * down;
    f1m[k] = corr.alpha1.values[k] * up;
    f2p[k] = corr.alpha2.values[k] * down;
    f2m[k] = corr.alpha2.values[k] * up;
  }
  const Eigen::VectorXcd k1p = cumulative_fourth_order(f1p, g.dt);
  const Eigen::VectorXcd k1m = cumulative_fourth_order(f1m, g.dt);
  const Eigen::VectorXcd k2p = cumulative_fourth_order(f2p, g.dt);
  const Eigen::VectorXcd k2m = cumulative_fourth_order(f2m, g.dt);
  const bool sx = coupling == CouplingOperator::SigmaX;
  Kernels out;
  out.c.resize(static_cast<std::size_t>(n));
  out.b.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    // sigma_x: d(-s) = sigma+ e^{-i w s} + sigma- e^{i w s}; sigma-: d(-s) = sigma- e^{i w s}.
    out.c[static_cast<std::size_t>(k)] = k1m[k] * kSigmaMinus + (sx ? k1p[k] : Complex(0)) * kSigmaPlus;
    out.b[static_cast<std::size_t>(k)] = k2p[k] * kSigmaPlus + (sx ? k2m[k] : Complex(0)) * kSigmaMinus;
  }
  return out;
}

Eigen::Matrix2cd rhs(const Eigen::Matrix2cd& rho, const Eigen::Matrix2cd& h, const Eigen::Matrix2cd& d,
                     const Eigen::Matrix2cd& c, const Eigen::Matrix2cd& b) {
  const Complex i(0.0, 1.0);
  const Eigen::Matrix2cd ddag = d.adjoint();
  const Eigen::Matrix2cd a = b.adjoint();
  const Eigen::Matrix2cd ra = rho * a;
  const Eigen::Matrix2cd br = b * rho;
  const Eigen::Matrix2cd cr = c * rho;
  const Eigen::Matrix2cd rcd = rho * c.adjoint();
  return -i * (h * rho - rho * h) + (ddag * ra - ra * ddag) + (br * d - d * br) +
         (cr * ddag - ddag * cr) + (d * rcd - rcd * d);
}

int correlation_stride(const BathCorrelation& corr, const TimeGrid& grid) {
  const TimeGrid& g = corr.alpha1.grid;
  const double ratio = grid.dt / g.dt;
  const long stride = std::lround(ratio);
  if (stride != kCorrelationRefinement || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
    throw ConfigError("correlation grid must refine the integrator grid by exactly 8");
  }
  if (g.count < (grid.count - 1) * static_cast<std::size_t>(stride) + 1) {
    throw ConfigError("correlation grid does not cover the integration interval");
  }
  return static_cast<int>(stride);
}

}  // namespace

double bose_factor(double omega, double inverse_temperature) {
  if (zero_temperature(inverse_temperature)) return 0.0;
  return 1.0 / std::expm1(inverse_temperature * omega);
}

BathCorrelation correlation_functions(const CorrelationSource& source, double beta,
                                      const TimeGrid& grid, double rel_tol) {
  check_inverse_temperature(beta);
  const bool cold = zero_temperature(beta);
  BathCorrelation corr;
  corr.inverse_temperature = beta;
  corr.alpha1.grid = grid;
  corr.alpha2.grid = grid;
  const auto n = static_cast<Eigen::Index>(grid.count);

  if (const auto* bath = std::get_if<DiscreteBath>(&source)) {
    validate(*bath);
    corr.source = "discrete:" + bath->method_tag;
    NodeRule emit;
    NodeRule absorb;
    for (Eigen::Index k = 0; k < bath->size(); ++k) {
      const double x = bath->energies[k];
      if (!cold && !(x > 0.0)) throw ConfigError("finite temperature needs bath energies > 0");
      const double occ = bose_factor(x, beta);
      emit.nodes.push_back(x);
      emit.coefficients.push_back(bath->weights[k] * (occ + 1.0));
      absorb.nodes.push_back(x);
      absorb.coefficients.push_back(bath->weights[k] * occ);
    }
    corr.alpha1.values = fourier_sum(emit, grid);
    corr.alpha2.values = cold ? Eigen::VectorXcd::Zero(n) : Eigen::VectorXcd(fourier_sum(absorb, grid).conjugate());
    return corr;
  }

  const auto& J = std::get<SpectralDensity>(source);
  corr.source = "continuous:" + J.describe();
  if (!cold) check_thermal_density(J);
  const auto bp = J.breakpoints();
  const double t_max = std::max(grid.t_end(), 1e-12);
  auto emit_env = [&](double x) {
    if (cold) return J(x);
    return x > 0.0 ? J(x) * (bose_factor(x, beta) + 1.0) : 0.0;
  };
  corr.alpha1.values = fourier_sum(build_fourier_rule(emit_env, bp, t_max, rel_tol), grid);
  if (cold) {
    corr.alpha2.values = Eigen::VectorXcd::Zero(n);
  } else {
    auto absorb_env = [&](double x) { return x > 0.0 ? J(x) * bose_factor(x, beta) : 0.0; };
    corr.alpha2.values =
        fourier_sum(build_fourier_rule(absorb_env, bp, t_max, rel_tol), grid).conjugate();
  }
  return corr;
}

TimeSeries gamma_integral(const BathCorrelation& corr, double omega_s) {
  const TimeGrid& g = corr.alpha1.grid;
  const auto n = static_cast<Eigen::Index>(g.count);
  TimeSeries out{g, Eigen::VectorXcd::Zero(n)};
  Complex prev = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = g.t(static_cast<std::size_t>(k));
    const Complex f =
        (corr.alpha1.values[k] + std::conj(corr.alpha2.values[k])) * std::polar(1.0, omega_s * t);
    if (k > 0) out.values[k] = out.values[k - 1] + 0.5 * g.dt * (prev + f);
    prev = f;
  }
  return out;
}

TimeGrid correlation_grid(const TimeGrid& grid) {
  return TimeGrid{grid.dt / kCorrelationRefinement,
                  (grid.count - 1) * static_cast<std::size_t>(kCorrelationRefinement) + 1};
}

std::vector<DensityMatrix2> integrate_me_fixed(double omega_s, const BathCorrelation& corr,
                                               const TimeGrid& grid, int substeps,
                                               const MeOptions& options) {
  if (substeps != 1 && substeps != 2 && substeps != 4) {
    throw ConfigError("integrate_me_fixed: substeps must be 1, 2 or 4");
  }
  const int stride = correlation_stride(corr, grid);
  const int half_stride = stride / (2 * substeps);  // correlation samples per half step
  const Kernels kernels = build_kernels(omega_s, corr, options.coupling);
  const Eigen::Matrix2cd h = (Eigen::Matrix2cd() << omega_s, 0, 0, 0).finished();
  const Eigen::Matrix2cd d =
      options.coupling == CouplingOperator::SigmaX ? Eigen::Matrix2cd(kSigmaMinus + kSigmaPlus) : kSigmaMinus;
  const double step = grid.dt / substeps;

  std::vector<DensityMatrix2> states;
  states.reserve(grid.count);
  Eigen::Matrix2cd rho = options.initial;
  states.push_back(rho);
  std::size_t idx = 0;  // correlation index of the current time
  for (std::size_t k = 1; k < grid.count; ++k) {
    for (int sub = 0; sub < substeps; ++sub) {
      const std::size_t mid = idx + static_cast<std::size_t>(half_stride);
      const std::size_t end = idx + 2 * static_cast<std::size_t>(half_stride);
      const auto f = [&](const Eigen::Matrix2cd& r, std::size_t j) {
        return rhs(r, h, d, kernels.c[j], kernels.b[j]);
      };
      const Eigen::Matrix2cd k1 = f(rho, idx);
      const Eigen::Matrix2cd k2 = f(rho + 0.5 * step * k1, mid);
      const Eigen::Matrix2cd k3 = f(rho + 0.5 * step * k2, mid);
      const Eigen::Matrix2cd k4 = f(rho + step * k3, end);
      rho += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      idx = end;
    }
    states.push_back(rho);
  }
  return states;
}

MeSolution integrate_me(double omega_s, const BathCorrelation& corr, const TimeGrid& grid,
                        const MeOptions& options) {
  MeSolution sol;
  sol.grid = grid;
  sol.states = integrate_me_fixed(omega_s, corr, grid, 1, options);
  if (options.check_halving) {
    const auto fine = integrate_me_fixed(omega_s, corr, grid, 2, options);
    for (std::size_t k = 0; k < grid.count; ++k) {
      sol.halving_defect = std::max(sol.halving_defect, (sol.states[k] - fine[k]).cwiseAbs().maxCoeff());
    }
    if (sol.halving_defect > options.halving_tolerance) {
      throw NumericalError("master equation step-halving check failed; reduce dt", sol.halving_defect);
    }
  }
  const auto n = static_cast<Eigen::Index>(grid.count);
  sol.population = RealSeries{grid, Eigen::VectorXd(n)};
  sol.coherence = RealSeries{grid, Eigen::VectorXd(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& rho = sol.states[static_cast<std::size_t>(k)];
    sol.population.values[k] = rho(0, 0).real();
    sol.coherence.values[k] = std::abs(rho(0, 1));
    sol.max_trace_error = std::max(sol.max_trace_error, std::abs(rho.trace() - options.initial.trace()));
    sol.max_hermiticity_error =
        std::max(sol.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
  }
  return sol;
}

}  // namespace bathdisc
