#include "bathdisc/many_body.hpp"
#include "bathdisc/ortho_quad.hpp"
#include "bathdisc/sp_evolve.hpp"

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

using namespace bathdisc;
using namespace std::complex_literals;

namespace {

const SpectralDensity kTriple = SpectralDensity::gaussian_mix({-4.0, 0.0, 4.0}, 0.5, -5.0, 5.0);

Eigen::VectorXd dense_spectrum(const SparseHamiltonian& h) {
  const Eigen::MatrixXd m(h.matrix);
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

// All sums over subsets of the given single-particle energies, per subset size.
std::vector<std::vector<double>> subset_sums(const Eigen::VectorXd& e) {
  const int n = static_cast<int>(e.size());
  std::vector<std::vector<double>> by_size(n + 1);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) s += e[i];
    }
    by_size[std::popcount(mask)].push_back(s);
  }
  return by_size;
}

}  // namespace

TEST_SUITE("many_body") {
  TEST_CASE("Fock basis") {
    const FockBasis basis(3, Sector{1, 2});
    CHECK(basis.dimension() == 9);
    CHECK(FockBasis::sector_dimension(3, Sector{1, 2}) == 9);
    CHECK(std::is_sorted(basis.states().begin(), basis.states().end()));
    for (std::size_t i = 0; i < basis.dimension(); ++i) CHECK(basis.index_of(basis.state(i)) == i);
    CHECK(basis.index_of(0u) == basis.dimension());
  }

  TEST_CASE("atomic limit spectrum") {
    const SiamModel model = atomic_siam(4.0);
    std::vector<double> energies;
    for (int up = 0; up <= 1; ++up) {
      for (int down = 0; down <= 1; ++down) {
        const auto h = sector_hamiltonian(model, Sector{up, down});
        const Eigen::VectorXd e = dense_spectrum(h);
        energies.insert(energies.end(), e.data(), e.data() + e.size());
      }
    }
    REQUIRE(energies.size() == 4);
    CHECK(energies[0] == doctest::Approx(1.0));   // empty
    CHECK(energies[1] == doctest::Approx(-1.0));  // down only
    CHECK(energies[2] == doctest::Approx(-1.0));  // up only
    CHECK(energies[3] == doctest::Approx(1.0));   // doubly occupied
  }

  TEST_CASE("U=0 spectrum is built from single-particle energies") {
    const auto bath = bsdo_discretize(kTriple, 2);
    const SiamModel model = build_siam(0.0, bath);
    const Eigen::MatrixXd hsp = build_single_particle_matrix(SingleParticleModel{0.0, bath});
    const Eigen::VectorXd sp =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hsp, Eigen::EigenvaluesOnly).eigenvalues();
    const auto sums = subset_sums(sp);
    for (int up = 0; up <= 3; ++up) {
      for (int down = 0; down <= 3; ++down) {
        const auto h = sector_hamiltonian(model, Sector{up, down});
        const Eigen::VectorXd e = dense_spectrum(h);
        std::vector<double> expected;
        for (double a : sums[up]) {
          for (double b : sums[down]) expected.push_back(a + b);
        }
        std::sort(expected.begin(), expected.end());
        REQUIRE(static_cast<std::size_t>(e.size()) == expected.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) CHECK(std::abs(e[i] - expected[i]) < 1e-11);
      }
    }
  }

  TEST_CASE("Hamiltonian is exactly symmetric") {
    const SiamModel model = build_siam(4.0, bsdo_discretize(kTriple, 4));
    const auto h = sector_hamiltonian(model, Sector{2, 3});
    const Eigen::MatrixXd m(h.matrix);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("sector budget and bath size limits") {
    SiamModel model = build_siam(4.0, bsdo_discretize(kTriple, 6));
    model.sector_budget = 10;
    CHECK_THROWS_AS(sector_hamiltonian(model, Sector{3, 3}), ConfigError);
    CHECK_THROWS_AS(build_siam(0.0, bsdo_discretize(kTriple, kMaxManyBodyBath + 1)), ConfigError);
  }

  TEST_CASE("ground states") {
    const GroundState atomic = ground_state(atomic_siam(4.0));
    CHECK(atomic.energy == doctest::Approx(-1.0).epsilon(1e-14));
    const Sector s = atomic.state.basis.sector();
    CHECK(s.up + s.down == 1);
    CHECK(atomic.residual < kResidualTolerance);

    const auto bath = bsdo_discretize(kTriple, 5);
    const GroundState free = ground_state(build_siam(0.0, bath));
    const Eigen::MatrixXd hsp = build_single_particle_matrix(SingleParticleModel{0.0, bath});
    const Eigen::VectorXd sp =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hsp, Eigen::EigenvaluesOnly).eigenvalues();
    double fermi_sea = 0.0;
    for (Eigen::Index i = 0; i < sp.size(); ++i) fermi_sea += std::min(sp[i], 0.0);
    CHECK(free.energy == doctest::Approx(2.0 * fermi_sea).epsilon(1e-12));
    CHECK(free.residual < kResidualTolerance);
  }

  TEST_CASE("Lanczos ground state agrees with the dense solver") {
    const SiamModel model = build_siam(4.0, bsdo_discretize(kTriple, 6));
    const auto h = sector_hamiltonian(model, Sector{3, 4});
    REQUIRE(h.basis.dimension() > 600);
    const GroundState gs = ground_state(h);
    CHECK(gs.energy == doctest::Approx(dense_spectrum(h)[0]).epsilon(1e-11));
    CHECK(gs.residual < kResidualTolerance);
  }

  TEST_CASE("atomic-limit Green's overlap") {
    const SiamModel model = atomic_siam(4.0);
    const GroundState gs = ground_state(model);
    const TimeGrid grid = TimeGrid::until(10.0, 0.05);
    const GreensOverlap go = greens_overlap(model, gs, grid);
    for (std::size_t k = 0; k < grid.count; ++k) {
      const auto expected = std::exp(-2i * grid.t(k));  // iG = exp(-i U t / 2)
      CHECK(std::abs(go.values.values[static_cast<Eigen::Index>(k)] - expected) < 1e-10);
    }
  }

  TEST_CASE("U=0 Green's overlap matches the quadratic construction") {
    const auto bath = bsdo_discretize(kTriple, 6);
    const SiamModel model = build_siam(0.0, bath);
    const GroundState gs = ground_state(model);
    const TimeGrid grid = TimeGrid::until(10.0, 0.05);
    const GreensOverlap go = greens_overlap(model, gs, grid);
    CHECK(std::abs(go.values.values[0]) <= 1.0 + 1e-12);
    CHECK(std::abs(go.values.values[0]) == doctest::Approx(go.weight).epsilon(1e-12));

    const SystemSpectrum sp = system_spectrum(SingleParticleModel{0.0, bath});
    const int filled = gs.state.basis.sector().up;
    const double fermi = 0.5 * (sp.energies[filled - 1] + sp.energies[filled]);
    const TimeSeries oracle = particle_overlap(sp, grid, fermi);
    CHECK((oracle.values - go.values.values).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(go.max_norm_drift < 1e-10);
  }

  TEST_CASE("U=0 retarded function is the single-particle propagator") {
    const auto bath = bsdo_discretize(kTriple, 6);
    const SiamModel model = build_siam(0.0, bath);
    const GroundState gs = ground_state(model);
    const TimeGrid grid = TimeGrid::until(10.0, 0.05);
    const TimeSeries retarded = retarded_greens(greens_overlap(model, gs, grid), hole_overlap(model, gs, grid));
    const TimeSeries g = greens_function(SingleParticleModel{0.0, bath}, grid);
    CHECK(std::abs(retarded.values[0] - 1.0) < 1e-12);
    CHECK((retarded.values - 1i * g.values).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("atomic-limit retarded function") {
    const SiamModel model = atomic_siam(4.0);
    const GroundState gs = ground_state(model);
    const TimeGrid grid = TimeGrid::until(5.0, 0.05);
    const GreensOverlap hole = hole_overlap(model, gs, grid);
    const TimeSeries retarded = retarded_greens(greens_overlap(model, gs, grid), hole);
    // The chosen sector has the up level empty, so only the particle part contributes.
    CHECK(hole.values.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(retarded.values[0] - 1.0) < 1e-12);
  }
}
