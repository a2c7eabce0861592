#include "bathdisc/many_body.hpp"

#include "bathdisc/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>

namespace bathdisc {

namespace {

using Complex = std::complex<double>;

// Spreads the low `sites` bits of mask onto the even bit positions.
std::uint32_t spread(std::uint32_t mask, int sites) {
  std::uint32_t out = 0;
  for (int i = 0; i < sites; ++i) {
    if (mask & (1u << i)) out |= 1u << (2 * i);
  }
  return out;
}

std::vector<std::uint32_t> masks_with_count(int sites, int count) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t m = 0; m < (1u << sites); ++m) {
    if (std::popcount(m) == count) out.push_back(m);
  }
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Sign of c_p^dag c_q (or c_q^dag c_p) on `state`: parity of occupied orbitals
// strictly between p and q.
double hop_sign(std::uint32_t state, int p, int q) {
  const int lo = std::min(p, q);
  const int hi = std::max(p, q);
  const std::uint32_t between = ((1u << hi) - 1u) & ~((1u << (lo + 1)) - 1u);
  return std::popcount(state & between) % 2 == 0 ? 1.0 : -1.0;
}

std::string sector_label(Sector s) {
  return "(" + std::to_string(s.up) + "," + std::to_string(s.down) + ")";
}

Eigen::VectorXcd multiply(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXcd& v) {
  const Eigen::VectorXd re = h * v.real();
  const Eigen::VectorXd im = h * v.imag();
  Eigen::VectorXcd out(v.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

constexpr std::size_t kDenseLimit = 600;
constexpr int kMaxLanczos = 200;
constexpr int kMaxRestarts = 30;

GroundState finish(const SparseHamiltonian& h, double energy, Eigen::VectorXd v) {
  v.normalize();
  GroundState gs{energy, ManyBodyState{h.basis, v}, 0.0, {}};
  gs.energy = v.dot(h.matrix * v);
  gs.residual = (h.matrix * v - gs.energy * v).norm();
  return gs;
}

GroundState dense_ground_state(const SparseHamiltonian& h) {
  const Eigen::MatrixXd m = Eigen::MatrixXd(h.matrix);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
  GroundState gs = finish(h, solver.eigenvalues()[0], solver.eigenvectors().col(0));
  if (m.rows() > 1 && solver.eigenvalues()[1] - solver.eigenvalues()[0] < kDegeneracyGap) {
    gs.notes.push_back("degenerate ground state within sector " + sector_label(h.basis.sector()));
  }
  return gs;
}

GroundState lanczos_ground_state(const SparseHamiltonian& h) {
  const auto dim = static_cast<Eigen::Index>(h.basis.dimension());
  Eigen::VectorXd start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
  start.normalize();

  double second_gap = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < kMaxRestarts; ++restart) {
    std::vector<Eigen::VectorXd> q{start};
    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::VectorXd ritz;
    double theta = 0.0;
    const int cap = static_cast<int>(std::min<Eigen::Index>(dim, kMaxLanczos));
    for (int j = 0; j < cap; ++j) {
      Eigen::VectorXd w = h.matrix * q[j];
      alpha.push_back(q[j].dot(w));
      w -= alpha.back() * q[j];
      if (j > 0) w -= beta.back() * q[j - 1];
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : q) w -= v.dot(w) * v;
      }
      const double b = w.norm();

      const auto m = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd off = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, off);
      theta = tri.eigenvalues()[0];
      ritz = tri.eigenvectors().col(0);
      if (m > 1) second_gap = tri.eigenvalues()[1] - theta;
      const bool invariant = b < 1e-14 * std::max(1.0, std::abs(theta));
      if (invariant || b * std::abs(ritz[m - 1]) < 0.1 * kResidualTolerance || j + 1 == cap) break;
      beta.push_back(b);
      q.push_back(w / b);
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index k = 0; k < ritz.size(); ++k) v += ritz[k] * q[static_cast<std::size_t>(k)];
    GroundState gs = finish(h, theta, std::move(v));
    if (gs.residual < kResidualTolerance) {
      if (second_gap < kDegeneracyGap) {
        gs.notes.push_back("degenerate ground state within sector " + sector_label(h.basis.sector()));
      }
      return gs;
    }
    start = gs.state.amplitudes;
  }
  throw NumericalError("Lanczos ground state did not reach the residual tolerance");
}

// One Krylov step psi -> exp(-i (H - shift) dt) psi, or nullopt when the
// Krylov dimension cap is hit before the error estimate drops below tolerance.
std::optional<Eigen::VectorXcd> krylov_step(const Eigen::SparseMatrix<double>& h, double shift,
                                            const Eigen::VectorXcd& psi, double dt, int& used) {
  const double norm = psi.norm();
  const auto dim = psi.size();
  const int cap = static_cast<int>(std::min<Eigen::Index>(dim, 40));
  std::vector<Eigen::VectorXcd> q{psi / norm};
  std::vector<double> alpha;
  std::vector<double> beta;
  for (int j = 0; j < cap; ++j) {
    Eigen::VectorXcd w = multiply(h, q[j]) - shift * q[j];
    alpha.push_back(q[j].dot(w).real());
    w -= alpha.back() * q[j];
    if (j > 0) w -= beta.back() * q[j - 1];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : q) w -= v.dot(w) * v;
    }
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd off = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, off);
    const Eigen::MatrixXd& vecs = tri.eigenvectors();
    Eigen::VectorXcd phase(m);
    for (Eigen::Index k = 0; k < m; ++k) phase[k] = vecs(0, k) * std::polar(1.0, -tri.eigenvalues()[k] * dt);
    const Eigen::VectorXcd coeffs = vecs.cast<Complex>() * phase;

    const bool invariant = b < 1e-14;
    if (invariant || b * std::abs(coeffs[m - 1]) < kKrylovTolerance) {
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
      for (Eigen::Index k = 0; k < m; ++k) out += coeffs[k] * q[static_cast<std::size_t>(k)];
      used = std::max(used, static_cast<int>(m));
      return out * norm;
    }
    beta.push_back(b);
    q.push_back(w / b);
  }
  return std::nullopt;
}

Eigen::VectorXcd propagate(const Eigen::SparseMatrix<double>& h, double shift,
                           const Eigen::VectorXcd& psi, double dt, int& used, int depth = 0) {
  if (auto out = krylov_step(h, shift, psi, dt, used)) return *std::move(out);
  if (depth > 20) throw NumericalError("Krylov propagation failed to reach tolerance");
  const Eigen::VectorXcd half = propagate(h, shift, psi, 0.5 * dt, used, depth + 1);
  return propagate(h, shift, half, 0.5 * dt, used, depth + 1);
}

}  // namespace

FockBasis::FockBasis(int sites, Sector sector) : sites_(sites), sector_(sector) {
  if (sites < 1 || 2 * sites > 32) throw ConfigError("FockBasis: site count out of range");
  if (sector.up < 0 || sector.up > sites || sector.down < 0 || sector.down > sites) {
    throw ConfigError("FockBasis: particle numbers out of range");
  }
  const auto ups = masks_with_count(sites, sector.up);
  const auto downs = masks_with_count(sites, sector.down);
  states_.reserve(ups.size() * downs.size());
  for (auto u : ups) {
    for (auto d : downs) states_.push_back(spread(u, sites) | (spread(d, sites) << 1));
  }
  std::sort(states_.begin(), states_.end());
}

std::size_t FockBasis::index_of(std::uint32_t state) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), state);
  if (it == states_.end() || *it != state) return states_.size();
  return static_cast<std::size_t>(it - states_.begin());
}

std::size_t FockBasis::sector_dimension(int sites, Sector sector) {
  return static_cast<std::size_t>(binomial(sites, sector.up) * binomial(sites, sector.down));
}

SiamModel build_siam(double interaction, const DiscreteBath& bath, double impurity_level) {
  validate(bath);
  if (bath.size() > kMaxManyBodyBath) {
    throw ConfigError("many-body bath limited to " + std::to_string(kMaxManyBodyBath) + " modes");
  }
  SiamModel model;
  model.interaction = interaction;
  model.impurity_level = impurity_level;
  model.bath_energies = bath.energies;
  model.couplings = bath.weights.cwiseSqrt();
  return model;
}

SiamModel atomic_siam(double interaction, double impurity_level) {
  SiamModel model;
  model.interaction = interaction;
  model.impurity_level = impurity_level;
  return model;
}

SparseHamiltonian sector_hamiltonian(const SiamModel& model, Sector sector) {
  const int sites = model.sites();
  if (FockBasis::sector_dimension(sites, sector) > model.sector_budget) {
    throw ConfigError("sector " + sector_label(sector) + " exceeds the dimension budget");
  }
  FockBasis basis(sites, sector);
  const std::size_t dim = basis.dimension();
  std::vector<Eigen::Triplet<double>> triplets;
  const int n_bath = sites - 1;
  triplets.reserve(dim * static_cast<std::size_t>(1 + 4 * n_bath));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint32_t s = basis.state(i);
    const double n_up = (s & 1u) ? 1.0 : 0.0;
    const double n_dn = (s & 2u) ? 1.0 : 0.0;
    double diag = model.interaction * (n_up - 0.5) * (n_dn - 0.5) +
                  model.impurity_level * (n_up + n_dn);
    for (int k = 0; k < n_bath; ++k) {
      const int up = 2 + 2 * k;
      diag += model.bath_energies[k] * (((s >> up) & 1u) + ((s >> (up + 1)) & 1u));
    }
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);

    for (int spin = 0; spin < 2; ++spin) {
      const int p = spin;
      for (int k = 0; k < n_bath; ++k) {
        const int q = 2 + 2 * k + spin;
        const bool occ_p = (s >> p) & 1u;
        const bool occ_q = (s >> q) & 1u;
        if (occ_p == occ_q) continue;
        const std::uint32_t t = s ^ (1u << p) ^ (1u << q);
        const std::size_t j = basis.index_of(t);
        triplets.emplace_back(static_cast<int>(j), static_cast<int>(i),
                              model.couplings[k] * hop_sign(s, p, q));
      }
    }
  }
  Eigen::SparseMatrix<double> h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(triplets.begin(), triplets.end());
  return SparseHamiltonian{std::move(basis), std::move(h)};
}

GroundState ground_state(const SparseHamiltonian& h) {
  return h.basis.dimension() <= kDenseLimit ? dense_ground_state(h) : lanczos_ground_state(h);
}

GroundState ground_state(const SiamModel& model) {
  const int sites = model.sites();
  const int lo = sites / 2;
  const int hi = (sites + 1) / 2;
  std::vector<Sector> candidates;
  for (int u : {lo, hi}) {
    for (int d : {lo, hi}) candidates.push_back({u, d});
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<GroundState> results;
  double best = std::numeric_limits<double>::infinity();
  for (Sector s : candidates) {
    results.push_back(ground_state(sector_hamiltonian(model, s)));
    best = std::min(best, results.back().energy);
  }
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].energy <= best + kDegeneracyGap) tied.push_back(i);
  }
  GroundState chosen = std::move(results[tied.front()]);
  if (tied.size() > 1) {
    std::ostringstream os;
    os << "ground state degenerate across sectors";
    for (std::size_t i : tied) os << ' ' << sector_label(candidates[i]);
    os << "; chose " << sector_label(candidates[tied.front()]);
    chosen.notes.push_back(os.str());
  }
  chosen.notes.push_back("sector=" + sector_label(chosen.state.basis.sector()));
  return chosen;
}

namespace {

// Krylov series weight * <psi0| exp(-i(H - E0)t) |psi0> for an unnormalized start vector.
GreensOverlap propagate_overlap(const SparseHamiltonian& h, Sector sector, double e0, Eigen::VectorXcd psi0,
                                const TimeGrid& grid) {
  const double weight = psi0.squaredNorm();
  psi0 /= std::sqrt(weight);
  GreensOverlap out;
  out.weight = weight;
  out.sector = sector;
  out.values.grid = grid;
  out.values.values.resize(static_cast<Eigen::Index>(grid.count));
  Eigen::VectorXcd psi = psi0;
  for (std::size_t k = 0; k < grid.count; ++k) {
    if (k > 0) psi = propagate(h.matrix, e0, psi, grid.dt, out.max_krylov_dimension);
    out.values.values[static_cast<Eigen::Index>(k)] = weight * psi0.dot(psi);
    out.max_norm_drift = std::max(out.max_norm_drift, std::abs(psi.norm() - 1.0));
  }
  return out;
}

}  // namespace

GreensOverlap greens_overlap(const SiamModel& model, const GroundState& ground, const TimeGrid& grid) {
  const FockBasis& from = ground.state.basis;
  const Sector target{from.sector().up + 1, from.sector().down};
  if (target.up > model.sites()) {
    throw NumericalError("d_up^dag annihilates the ground state (impurity up level full)");
  }
  const SparseHamiltonian h = sector_hamiltonian(model, target);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.basis.dimension()));
  for (std::size_t i = 0; i < from.dimension(); ++i) {
    const std::uint32_t s = from.state(i);
    if (s & 1u) continue;  // impurity up is bit 0: no Jordan-Wigner string
    psi0[static_cast<Eigen::Index>(h.basis.index_of(s | 1u))] = ground.state.amplitudes[static_cast<Eigen::Index>(i)];
  }
  if (!(psi0.squaredNorm() > 1e-28)) {
    throw NumericalError("d_up^dag annihilates the ground state (impurity up level full)");
  }
  return propagate_overlap(h, target, ground.energy, std::move(psi0), grid);
}

GreensOverlap hole_overlap(const SiamModel& model, const GroundState& ground, const TimeGrid& grid) {
  const FockBasis& from = ground.state.basis;
  GreensOverlap out;
  out.sector = {from.sector().up - 1, from.sector().down};
  out.values.grid = grid;
  out.values.values = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.count));
  if (out.sector.up < 0) return out;
  const SparseHamiltonian h = sector_hamiltonian(model, out.sector);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.basis.dimension()));
  for (std::size_t i = 0; i < from.dimension(); ++i) {
    const std::uint32_t s = from.state(i);
    if (!(s & 1u)) continue;
    psi0[static_cast<Eigen::Index>(h.basis.index_of(s & ~1u))] = ground.state.amplitudes[static_cast<Eigen::Index>(i)];
  }
  if (!(psi0.squaredNorm() > 1e-28)) return out;
  out = propagate_overlap(h, out.sector, ground.energy, std::move(psi0), grid);
  out.values.values = out.values.values.conjugate().eval();  // forward time for the hole runs with +i(H - E0)
  return out;
}

TimeSeries retarded_greens(const GreensOverlap& particle, const GreensOverlap& hole) {
  if (!same_grid(particle.values.grid, hole.values.grid)) throw ConfigError("retarded_greens: grid mismatch");
  return {particle.values.grid, particle.values.values + hole.values.values};
}

}  // namespace bathdisc
