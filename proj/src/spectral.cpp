#include "bathdisc/spectral.hpp"

#include "bathdisc/quadrature.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace bathdisc {

namespace {

void require_support(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw ConfigError("spectral density support must be a finite interval with a < b");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> pieces_between(const SpectralDensity& J, double lo, double hi) {
  std::vector<double> pts{lo};
  for (double p : J.breakpoints()) {
    if (p > lo && p < hi) pts.push_back(p);
  }
  pts.push_back(hi);
  return pts;
}

}  // namespace

SpectralDensity SpectralDensity::caldeira_leggett(double alpha, double s, double omega_c,
                                                  double omega_max) {
  if (!(alpha >= 0.0)) throw ConfigError("caldeira_leggett: alpha must be >= 0");
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("caldeira_leggett: s must be >= 0");
  if (!(omega_c > 0.0)) throw ConfigError("caldeira_leggett: omega_c must be > 0");
  require_support(0.0, omega_max);
  return SpectralDensity(CaldeiraLeggett{alpha, s, omega_c, omega_max}, 0.0, omega_max);
}

SpectralDensity SpectralDensity::gaussian_mix(std::vector<double> centers, double eta, double a,
                                              double b) {
  if (!(eta > 0.0)) throw ConfigError("gaussian_mix: eta must be > 0");
  if (centers.empty()) throw ConfigError("gaussian_mix: at least one center required");
  require_support(a, b);
  return SpectralDensity(GaussianMix{std::move(centers), eta}, a, b);
}

SpectralDensity SpectralDensity::flat(double height, double a, double b) {
  if (!(height >= 0.0) || !std::isfinite(height)) throw ConfigError("flat: height must be >= 0");
  require_support(a, b);
  return SpectralDensity(Flat{height}, a, b);
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() < 2) throw ConfigError("tabulated: need at least 2 grid points");
  if (grid.size() != values.size()) throw ConfigError("tabulated: grid/values length mismatch");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError("tabulated: non-finite grid point");
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw ConfigError("tabulated: values must be finite and nonnegative");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw ConfigError("tabulated: grid must be strictly increasing");
    }
  }
  const double a = grid.front();
  const double b = grid.back();
  return SpectralDensity(Tabulated{std::move(grid), std::move(values)}, a, b);
}

std::vector<double> SpectralDensity::breakpoints() const {
  if (const auto* t = std::get_if<Tabulated>(&family_)) return t->grid;
  return {a_, b_};
}

std::vector<double> SpectralDensity::singular_points() const {
  if (const auto* cl = std::get_if<CaldeiraLeggett>(&family_)) {
    if (cl->s != std::floor(cl->s)) return {0.0};
  }
  return {};
}

double SpectralDensity::truncated_tail_mass() const {
  const auto* cl = std::get_if<CaldeiraLeggett>(&family_);
  if (!cl) return 0.0;
  auto tail = [cl](double x) {
    return cl->alpha * std::pow(x, cl->s) * std::pow(cl->omega_c, 1.0 - cl->s) *
           std::exp(-x / cl->omega_c);
  };
  const double pts[] = {cl->omega_max, cl->omega_max + 100.0 * cl->omega_c};
  return integrate_adaptive<double>(tail, pts, 1e-12).value;
}

std::string SpectralDensity::describe() const {
  return std::visit(
      [&](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<F, CaldeiraLeggett>) {
          os << "caldeira_leggett(alpha=" << fmt(f.alpha) << ",s=" << fmt(f.s)
             << ",omega_c=" << fmt(f.omega_c) << ",omega_max=" << fmt(f.omega_max) << ")";
        } else if constexpr (std::is_same_v<F, GaussianMix>) {
          os << "gaussian_mix(centers=";
          for (std::size_t i = 0; i < f.centers.size(); ++i) {
            os << (i ? ";" : "") << fmt(f.centers[i]);
          }
          os << ",eta=" << fmt(f.eta) << ",support=" << fmt(a_) << ":" << fmt(b_) << ")";
        } else if constexpr (std::is_same_v<F, Flat>) {
          os << "flat(height=" << fmt(f.height) << ",support=" << fmt(a_) << ":" << fmt(b_) << ")";
        } else {
          os << "tabulated(points=" << f.grid.size() << ",support=" << fmt(a_) << ":" << fmt(b_)
             << ")";
        }
        return os.str();
      },
      family_);
}

double eval_density(const SpectralDensity& J, double x) { return J(x); }

double total_weight(const SpectralDensity& J) {
  return interval_weight(J, J.lower(), J.upper());
}

double interval_weight(const SpectralDensity& J, double lo, double hi) {
  lo = std::max(lo, J.lower());
  hi = std::min(hi, J.upper());
  if (!(hi > lo)) return 0.0;
  const auto pts = pieces_between(J, lo, hi);
  return integrate_adaptive<double>([&J](double x) { return J(x); }, pts, 1e-13, 1e-300).value;
}

IntervalMoments interval_moments(const SpectralDensity& J, double lo, double hi) {
  lo = std::max(lo, J.lower());
  hi = std::min(hi, J.upper());
  if (!(hi > lo)) return {0.0, 0.0};
  const auto pts = pieces_between(J, lo, hi);
  const double mass =
      integrate_adaptive<double>([&J](double x) { return J(x); }, pts, 1e-13, 1e-300).value;
  // First moment about the interval centre keeps cancellation small.
  const double c = 0.5 * (lo + hi);
  const double centred =
      integrate_adaptive<double>([&J, c](double x) { return (x - c) * J(x); }, pts, 1e-13,
                                 1e-15 * mass * (hi - lo))
          .value;
  return {mass, c * mass + centred};
}

std::complex<double> hybridization(const SpectralDensity& J, ComplexEnergy z) {
  const double a = J.lower();
  const double b = J.upper();
  if (z.imag() == 0.0 && z.real() >= a && z.real() <= b) {
    throw ConfigError("on-support singular evaluation; use broadened_density");
  }
  std::vector<double> pts = J.breakpoints();
  if (z.real() > a && z.real() < b) pts.push_back(z.real());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto f = [&J, z](double x) -> std::complex<double> { return J(x) / (z - x); };
  return integrate_adaptive<std::complex<double>>(f, pts, 1e-11, 1e-300, 40000).value;
}

double broadened_density(const SpectralDensity& J, double x, double eta) {
  if (!(eta > 0.0)) throw ConfigError("broadened_density: eta must be > 0");
  std::vector<double> pts = J.breakpoints();
  if (x > J.lower() && x < J.upper()) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  // -(1/pi) Im 1/(x + i eta - y) = (1/pi) eta / ((x - y)^2 + eta^2) >= 0.
  auto f = [&J, x, eta](double y) {
    const double d = x - y;
    return J(y) * eta / (d * d + eta * eta);
  };
  return integrate_adaptive<double>(f, pts, 1e-11, 1e-300, 40000).value / std::numbers::pi;
}

TimeSeries lambda_time(const SpectralDensity& J, const TimeGrid& grid, double rel_tol) {
  const auto pts = J.breakpoints();
  const NodeRule rule =
      build_fourier_rule([&J](double x) { return J(x); }, pts, grid.t_end(), rel_tol);
  return {grid, fourier_sum(rule, grid)};
}

std::complex<double> system_greens_real_axis(const SpectralDensity& J, double eps0, double x,
                                             double eta, HybridizationSign sign) {
  if (!(eta > 0.0)) throw ConfigError("system_greens_real_axis: eta must be > 0");
  const std::complex<double> z(x, eta);
  const double sigma = sign == HybridizationSign::Plus ? 1.0 : -1.0;
  const std::complex<double> den = z - eps0 + sigma * hybridization(J, z);
  if (std::abs(den) < 1e-300) throw NumericalError("system Green's function evaluated at a pole");
  return 1.0 / den;
}

SpectralDensity read_tabulated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabulated density file: " + path);
  std::vector<double> grid;
  std::vector<double> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    double x;
    double v;
    if (!(is >> x)) continue;
    std::string rest;
    if (!(is >> v) || (is >> rest)) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two columns 'x value'");
    }
    grid.push_back(x);
    values.push_back(v);
  }
  return SpectralDensity::tabulated(std::move(grid), std::move(values));
}

}  // namespace bathdisc
