#pragma once

#include "bathdisc/direct_disc.hpp"
#include "bathdisc/time_series.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace bathdisc {

// Particle numbers per spin.
struct Sector {
  int up = 0;
  int down = 0;

  auto operator<=>(const Sector&) const = default;
};

// Occupation bitstrings of one sector. Spin-orbital order (Jordan-Wigner):
// impurity up, impurity down, then bath mode k up/down at bits 2+2k / 3+2k,
// bath modes in ascending energy.
class FockBasis {
 public:
  FockBasis(int sites, Sector sector);

  int sites() const { return sites_; }
  Sector sector() const { return sector_; }
  std::size_t dimension() const { return states_.size(); }
  std::uint32_t state(std::size_t i) const { return states_[i]; }
  const std::vector<std::uint32_t>& states() const { return states_; }

  // Position of a bitstring, or dimension() if it is not in the sector.
  std::size_t index_of(std::uint32_t state) const;

  static std::size_t sector_dimension(int sites, Sector sector);

 private:
  int sites_;
  Sector sector_;
  std::vector<std::uint32_t> states_;  // ascending
};

inline constexpr int kMaxManyBodyBath = 12;
inline constexpr std::size_t kDefaultSectorBudget = 4'000'000;

// U (n_up - 1/2)(n_down - 1/2) + eps_d (n_up + n_down) on the impurity, the
// same star bath for both spins, couplings sqrt(weight_n).
struct SiamModel {
  double interaction = 0.0;
  double impurity_level = 0.0;
  Eigen::VectorXd bath_energies;
  Eigen::VectorXd couplings;
  std::size_t sector_budget = kDefaultSectorBudget;

  int sites() const { return 1 + static_cast<int>(bath_energies.size()); }
};

// Throws ConfigError for more than kMaxManyBodyBath bath modes.
SiamModel build_siam(double interaction, const DiscreteBath& bath, double impurity_level = 0.0);
// Impurity without bath.
SiamModel atomic_siam(double interaction, double impurity_level = 0.0);

struct SparseHamiltonian {
  FockBasis basis;
  Eigen::SparseMatrix<double> matrix;
};

// Hamiltonian restricted to one sector; throws ConfigError when the sector
// dimension exceeds model.sector_budget.
SparseHamiltonian sector_hamiltonian(const SiamModel& model, Sector sector);

struct ManyBodyState {
  FockBasis basis;
  Eigen::VectorXd amplitudes;
};

struct GroundState {
  double energy = 0.0;
  ManyBodyState state;
  double residual = 0.0;
  std::vector<std::string> notes;  // degeneracy reports, sector choice
};

inline constexpr double kResidualTolerance = 1e-10;
inline constexpr double kDegeneracyGap = 1e-10;

// Lowest eigenpair in one sector (Lanczos with full reorthogonalization,
// dense solve for small sectors).
GroundState ground_state(const SparseHamiltonian& h);

// Searches N_up, N_down in {floor(L/2), ceil(L/2)}; energy ties within
// kDegeneracyGap go to the lexicographically smallest sector.
GroundState ground_state(const SiamModel& model);

struct GreensOverlap {
  TimeSeries values;  // iG(t) = <psi0| exp(-i(H - E0)t) |psi0>
  double weight = 0.0;  // ||d_up^dag |E0>||^2
  Sector sector;
  int max_krylov_dimension = 0;
  double max_norm_drift = 0.0;
};

inline constexpr double kKrylovTolerance = 1e-10;

// Krylov propagation of d_up^dag |E0> in the (N_up+1, N_down) sector.
GreensOverlap greens_overlap(const SiamModel& model, const GroundState& ground, const TimeGrid& grid);

// <E0| d_up^dag exp(+i(H - E0)t) d_up |E0>; zero when the impurity up level is empty.
GreensOverlap hole_overlap(const SiamModel& model, const GroundState& ground, const TimeGrid& grid);

// iG^R(t) = <{d_up(t), d_up^dag}>, the sum of the particle and hole overlaps.
TimeSeries retarded_greens(const GreensOverlap& particle, const GreensOverlap& hole);

}  // namespace bathdisc
