#include "bathdisc/chain_map.hpp"
#include "bathdisc/ortho_quad.hpp"

#include <doctest.h>

#include <cmath>

using namespace bathdisc;

namespace {

const SpectralDensity kFlat = SpectralDensity::flat(1.0, -1.0, 1.0);

SpectralDensity subohmic() { return SpectralDensity::caldeira_leggett(1.0, 0.5, 10.0, 50.0); }

}  // namespace

TEST_SUITE("ortho_quad") {
  TEST_CASE("unit weight recurrence") {
    const auto rc = stieltjes_recurrence(kFlat, 6);
    CHECK(rc.weight_tag == WeightKind::Unit);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(rc.alphas[n]) < 1e-14);
    CHECK(rc.betas[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(rc.betas[1] == doctest::Approx(4.0 / 15.0).epsilon(1e-13));
    CHECK(rc.norm0 == doctest::Approx(2.0).epsilon(1e-14));
    const auto closed = legendre_recurrence(-1.0, 1.0, 6);
    for (int n = 1; n < 6; ++n) {
      CHECK(closed.betas[n - 1] == doctest::Approx(n * n / (4.0 * n * n - 1.0)).epsilon(1e-15));
      CHECK(rc.betas[n - 1] == doctest::Approx(closed.betas[n - 1]).epsilon(1e-13));
    }
  }

  TEST_CASE("golub_welsch") {
    const auto rule = golub_welsch(legendre_recurrence(-1.0, 1.0, 2));
    CHECK(rule.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(rule.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(rule.christoffel_weights[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rule.christoffel_weights[1] == doctest::Approx(1.0).epsilon(1e-14));

    const auto rc = stieltjes_recurrence(subohmic(), 1);
    const auto single = golub_welsch(rc);
    REQUIRE(single.nodes.size() == 1);
    CHECK(single.nodes[0] == rc.alphas[0]);
    CHECK(single.christoffel_weights[0] == rc.norm0);
  }

  TEST_CASE("flat BSDO coincides with Gauss-Legendre") {
    const auto bsdo = bsdo_discretize(kFlat, 10);
    const auto legendre = legendre_discretize(kFlat, 10);
    REQUIRE(bsdo.size() == legendre.size());
    for (Eigen::Index i = 0; i < bsdo.size(); ++i) {
      CHECK(std::abs(bsdo.energies[i] - legendre.energies[i]) < 1e-12);
      CHECK(std::abs(bsdo.weights[i] - legendre.weights[i]) < 1e-12);
    }
  }

  TEST_CASE("bsdo_discretize") {
    const auto two = bsdo_discretize(kFlat, 2);
    CHECK(two.energies[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(two.weights[1] == doctest::Approx(1.0).epsilon(1e-14));
    double m2 = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) m2 += two.weights[i] * two.energies[i] * two.energies[i];
    CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    const auto J = subohmic();
    const auto bath = bsdo_discretize(J, 20);
    CHECK(std::abs(bath.total_weight() - total_weight(J)) < 1e-12 * total_weight(J));
    validate(bath);
  }

  TEST_CASE("large orders switch to extended precision") {
    const auto rc = stieltjes_recurrence(subohmic(), 50);
    CHECK(rc.precision == Precision::Extended);
    const auto small = stieltjes_recurrence(subohmic(), 10);
    CHECK(small.precision == Precision::Double);
  }

  TEST_CASE("legendre_discretize drops modes where J vanishes") {
    const auto J = SpectralDensity::tabulated({-1.0, -0.3, 0.3, 1.0}, {1.0, 0.0, 0.0, 1.0});
    const auto bath = legendre_discretize(J, 3);
    CHECK(bath.size() == 2);
    CHECK_FALSE(bath.notes.empty());
  }

  TEST_CASE("legendre_discretize total weight converges") {
    const auto J = subohmic();
    auto deviation = [&](int n) {
      return std::abs(legendre_discretize(J, n).total_weight() - total_weight(J)) / total_weight(J);
    };
    // The x^(1/2) endpoint limits Gauss-Legendre to algebraic convergence, about N^-3.
    const double d64 = deviation(64);
    const double d128 = deviation(128);
    MESSAGE("legendre relative mass deviation N_b=64 " << d64 << ", N_b=128 " << d128);
    CHECK(d64 < 1e-5);
    CHECK(d128 < d64 / 6.0);
  }

  TEST_CASE("chain_from_weight") {
    const auto chain = chain_from_weight(kFlat, 8);
    CHECK(chain.v_tot == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    for (int n = 0; n < 8; ++n) CHECK(std::abs(chain.alphas[n]) < 1e-14);
    for (int n = 1; n < 8; ++n) {
      CHECK(chain.betas[n - 1] == doctest::Approx(n * n / (4.0 * n * n - 1.0)).epsilon(1e-13));
    }
    const auto J = subohmic();
    const auto one = chain_from_weight(J, 1);
    const auto m = interval_moments(J, 0.0, 50.0);
    CHECK(one.alphas[0] == doctest::Approx(m.first / m.mass).epsilon(1e-12));
  }

  TEST_CASE("chain round trip reproduces the BSDO star") {
    const auto J = subohmic();
    const auto star = star_from_chain(chain_from_weight(J, 20));
    const auto bsdo = bsdo_discretize(J, 20);
    REQUIRE(star.size() == bsdo.size());
    for (Eigen::Index i = 0; i < star.size(); ++i) {
      CHECK(std::abs(star.energies[i] - bsdo.energies[i]) < 1e-10 * 50.0);
      CHECK(std::abs(star.weights[i] - bsdo.weights[i]) < 1e-10 * bsdo.total_weight());
    }
  }
}
