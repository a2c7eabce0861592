#pragma once

#include "bathdisc/direct_disc.hpp"
#include "bathdisc/ortho_quad.hpp"
#include "bathdisc/precision.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace bathdisc {

// Krylov basis and coefficients of a Lanczos run on a diagonal matrix.
template <typename Real>
struct LanczosState {
  std::vector<std::vector<Real>> basis;  // f_0 .. f_{m-1}
  std::vector<Real> alphas;
  std::vector<Real> betas;  // beta_1 .. beta_{m-1}
  bool breakdown = false;

  // Largest |<f_i|f_j>| over i != j.
  double max_overlap() const {
    using std::abs;
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        Real dot = 0;
        for (std::size_t k = 0; k < basis[i].size(); ++k) dot += basis[i][k] * basis[j][k];
        worst = std::max(worst, static_cast<double>(abs(dot)));
      }
    }
    return worst;
  }
};

// Breakdown threshold on beta, relative to the squared spectral scale.
template <typename Real>
Real lanczos_breakdown_threshold() {
  if constexpr (std::is_same_v<Real, double>) {
    return Real(1e-28);
  } else {
    return Real(1e-140);
  }
}

// Lanczos on diag(energies) from the normalized start vector, with full
// reorthogonalization (two Gram-Schmidt passes) at every step.
template <typename Real>
LanczosState<Real> lanczos_diagonal(const std::vector<Real>& energies, std::vector<Real> start,
                                    int steps) {
  using std::abs;
  using std::sqrt;
  const std::size_t n = energies.size();
  LanczosState<Real> st;
  Real scale = 1;
  for (const Real& x : energies) scale = std::max(scale, Real(abs(x)));
  const Real threshold = lanczos_breakdown_threshold<Real>() * scale * scale;

  st.basis.push_back(std::move(start));
  for (int k = 0; k < steps; ++k) {
    const auto& f = st.basis.back();
    Real alpha = 0;
    for (std::size_t i = 0; i < n; ++i) alpha += energies[i] * f[i] * f[i];
    st.alphas.push_back(alpha);
    if (k + 1 == steps) break;

    std::vector<Real> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = (energies[i] - alpha) * f[i];
    if (!st.betas.empty()) {
      const Real hop = sqrt(st.betas.back());
      const auto& prev = st.basis[st.basis.size() - 2];
      for (std::size_t i = 0; i < n; ++i) r[i] -= hop * prev[i];
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : st.basis) {
        Real dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += q[i] * r[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= dot * q[i];
      }
    }
    Real beta = 0;
    for (const Real& v : r) beta += v * v;
    if (!(beta > threshold)) {
      st.breakdown = true;
      break;
    }
    st.betas.push_back(beta);
    const Real norm = sqrt(beta);
    for (Real& v : r) v /= norm;
    st.basis.push_back(std::move(r));
  }
  return st;
}

// Chain form of a star bath: start vector V_n / V_tot. A breakdown before
// N_b steps returns the shorter exact chain and records it in the notes.
ChainCoefficients lanczos_tridiagonalize(const DiscreteBath& bath,
                                         Precision precision = Precision::Double);

// Diagonalizes the chain's bath tridiagonal: energies are its eigenvalues and
// weights are v_tot^2 times the squared first eigenvector components.
DiscreteBath star_from_chain(const ChainCoefficients& chain);

}  // namespace bathdisc
