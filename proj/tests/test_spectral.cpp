#include "bathdisc/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace bathdisc;

namespace {

const SpectralDensity kFlat = SpectralDensity::flat(1.0, -1.0, 1.0);

SpectralDensity subohmic() { return SpectralDensity::caldeira_leggett(1.0, 0.5, 10.0, 50.0); }

// Midpoint rule with the given panel count.
template <typename F>
auto midpoint(const F& f, double lo, double hi, long panels) {
  const double h = (hi - lo) / static_cast<double>(panels);
  decltype(f(lo)) sum{};
  for (long i = 0; i < panels; ++i) sum += f(lo + (static_cast<double>(i) + 0.5) * h);
  return sum * h;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("caldeira_leggett evaluates the closed form") {
    CHECK(eval_density(subohmic(), 10.0) == doctest::Approx(10.0 / std::exp(1.0)).epsilon(1e-14));
  }

  TEST_CASE("flat density is constant inside and zero outside") {
    CHECK(eval_density(kFlat, 0.3) == 1.0);
    CHECK(eval_density(kFlat, 2.0) == 0.0);
    CHECK(eval_density(subohmic(), 51.0) == 0.0);
    CHECK(eval_density(SpectralDensity::gaussian_mix({-4, 0, 4}, 0.5, -5, 5), 6.0) == 0.0);
  }

  TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(SpectralDensity::flat(1.0, 1.0, -1.0), ConfigError);
    CHECK_THROWS_AS(SpectralDensity::flat(-1.0, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(SpectralDensity::caldeira_leggett(1.0, 0.5, 10.0, -1.0), ConfigError);
    CHECK_THROWS_AS(SpectralDensity::tabulated({0.0}, {1.0}), ConfigError);
    CHECK_THROWS_AS(SpectralDensity::tabulated({0.0, 0.0, 1.0}, {1.0, 1.0, 1.0}), ConfigError);
  }

  TEST_CASE("total_weight") {
    CHECK(total_weight(kFlat) == doctest::Approx(2.0).epsilon(1e-14));
    const auto ohmic = SpectralDensity::caldeira_leggett(1.0, 1.0, 1.0, 60.0);
    CHECK(std::abs(total_weight(ohmic) - (1.0 - 61.0 * std::exp(-60.0))) < 1e-12);
    CHECK(total_weight(SpectralDensity::tabulated({0.0, 1.0}, {1.0, 1.0})) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("hybridization on and off the real axis") {
    CHECK(std::abs(hybridization(kFlat, {2.0, 0.0}) - std::log(3.0)) < 1e-12);
    CHECK(std::abs(hybridization(SpectralDensity::flat(0.0, -1.0, 1.0), {2.0, 0.0})) == 0.0);
    const std::complex<double> z{0.0, 1.0};
    const auto oracle = midpoint([&](double x) { return 1.0 / (z - x); }, -1.0, 1.0, 1'000'000);
    CHECK(std::abs(hybridization(kFlat, z) - oracle) < 1e-10);
    CHECK_THROWS_AS(hybridization(kFlat, {0.5, 0.0}), ConfigError);
  }

  TEST_CASE("broadened_density approaches J with O(eta) error") {
    double previous = 1.0;
    for (double eta : {1e-2, 1e-3, 1e-4}) {
      const double err = std::abs(broadened_density(kFlat, 0.0, eta) - 1.0);
      CHECK(err < previous);
      CHECK(err <= eta);
      previous = err;
    }
    CHECK(broadened_density(SpectralDensity::flat(0.0, -1.0, 1.0), 0.0, 1e-3) == 0.0);
    const double x = 11.0;
    const double eta = 1e-3;
    CHECK(broadened_density(kFlat, x, eta) <= eta * 2.0 / (std::numbers::pi * (x - 1.0) * (x - 1.0)));
  }

  TEST_CASE("lambda_time of the flat density is 2 sin t / t") {
    const TimeGrid grid = TimeGrid::until(2 * std::numbers::pi, std::numbers::pi / 100);
    const TimeSeries lam = lambda_time(kFlat, grid);
    CHECK(std::abs(lam.values[0] - 2.0) < 1e-12);
    CHECK(std::abs(lam.values[100]) < 1e-10);
    for (std::size_t k = 1; k < grid.count; ++k) {
      const double t = grid.t(k);
      CHECK(std::abs(lam.values[static_cast<Eigen::Index>(k)] - 2.0 * std::sin(t) / t) < 1e-10);
    }
  }

  TEST_CASE("lambda_time of the Sub-ohmic density matches a brute-force oracle") {
    const auto J = subohmic();
    const TimeGrid grid{1.0, 2};
    const TimeSeries lam = lambda_time(J, grid);
    CHECK(std::abs(lam.values[0] - total_weight(J)) < 1e-12 * total_weight(J));
    // x = u^2 removes the square-root endpoint so the midpoint rule converges fast.
    const auto oracle = midpoint(
        [&](double u) {
          const double x = u * u;
          return std::complex<double>(2.0 * u * J(x)) * std::exp(std::complex<double>(0.0, -x));
        },
        0.0, std::sqrt(50.0), 1'000'000);
    CHECK(std::abs(lam.values[1] - oracle) < 1e-8);
  }

  TEST_CASE("system_greens_real_axis") {
    const auto zero = SpectralDensity::flat(0.0, -1.0, 1.0);
    const auto free = system_greens_real_axis(zero, 0.0, 1.0, 1e-6);
    CHECK(std::abs(free - 1.0 / std::complex<double>(1.0, 1e-6)) < 1e-14);
    const auto plus = system_greens_real_axis(kFlat, 0.0, 2.0, 1e-8);
    CHECK(std::abs(plus - 1.0 / (2.0 + std::log(3.0))) < 1e-6);
    const auto minus = system_greens_real_axis(kFlat, 0.0, 2.0, 1e-8, HybridizationSign::Minus);
    CHECK(std::abs(minus - 1.0 / (2.0 - std::log(3.0))) < 1e-6);
    CHECK(system_greens_real_axis(zero, 0.3, 1.0, 1e-6, HybridizationSign::Minus) ==
          system_greens_real_axis(zero, 0.3, 1.0, 1e-6, HybridizationSign::Plus));
  }

  TEST_CASE("tabulated density interpolates linearly") {
    const auto J = SpectralDensity::tabulated({0.0, 1.0, 3.0}, {0.0, 2.0, 0.0});
    CHECK(J(0.5) == doctest::Approx(1.0));
    CHECK(J(2.0) == doctest::Approx(1.0));
    CHECK(total_weight(J) == doctest::Approx(3.0).epsilon(1e-13));
  }
}
