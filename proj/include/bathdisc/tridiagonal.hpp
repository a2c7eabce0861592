#pragma once

#include "bathdisc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bathdisc {

// Eigenvalues and squared first eigenvector components of a symmetric
// tridiagonal matrix.
template <typename Real>
struct TridiagonalSpectrum {
  std::vector<Real> eigenvalues;      // ascending
  std::vector<Real> first_components;  // squared, same order, sum to 1
};

namespace detail {

template <typename Real>
Real pythag(const Real& a, const Real& b) {
  using std::abs;
  using std::sqrt;
  const Real aa = abs(a);
  const Real ab = abs(b);
  if (aa > ab) {
    const Real r = ab / aa;
    return aa * sqrt(Real(1) + r * r);
  }
  if (ab == Real(0)) return Real(0);
  const Real r = aa / ab;
  return ab * sqrt(Real(1) + r * r);
}

template <typename Real>
Real copysign_real(const Real& mag, const Real& sign) {
  using std::abs;
  return sign >= Real(0) ? abs(mag) : -abs(mag);
}

}  // namespace detail

// Implicit-shift QL iteration on the tridiagonal matrix with the given
// diagonal and off-diagonal (off[i] couples i and i+1). Only the first row of
// the eigenvector matrix is accumulated, which is all Gauss weights need.
template <typename Real>
TridiagonalSpectrum<Real> tridiagonal_first_row(std::vector<Real> diag, std::vector<Real> off) {
  using std::abs;
  const int n = static_cast<int>(diag.size());
  if (n == 0) return {};
  if (static_cast<int>(off.size()) != n - 1) {
    throw Error("tridiagonal_first_row: off-diagonal must have n-1 entries");
  }
  std::vector<Real> e(n, Real(0));
  for (int i = 0; i + 1 < n; ++i) e[i] = off[i];
  std::vector<Real> z(n, Real(0));
  z[0] = 1;
  const Real eps = std::numeric_limits<Real>::epsilon();

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const Real dd = abs(diag[m]) + abs(diag[m + 1]);
        if (abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw NumericalError("tridiagonal eigensolver did not converge");
        Real g = (diag[l + 1] - diag[l]) / (Real(2) * e[l]);
        Real r = detail::pythag(g, Real(1));
        g = diag[m] - diag[l] + e[l] / (g + detail::copysign_real(r, g));
        Real s = 1;
        Real c = 1;
        Real p = 0;
        int i;
        for (i = m - 1; i >= l; --i) {
          Real f = s * e[i];
          const Real b = c * e[i];
          r = detail::pythag(f, g);
          e[i + 1] = r;
          if (r == Real(0)) {
            diag[i + 1] -= p;
            e[m] = 0;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + Real(2) * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == Real(0) && i >= l) continue;
        diag[l] -= p;
        e[l] = g;
        e[m] = 0;
      }
    } while (m != l);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return diag[i] < diag[j]; });
  TridiagonalSpectrum<Real> out;
  out.eigenvalues.reserve(n);
  out.first_components.reserve(n);
  for (int k : order) {
    out.eigenvalues.push_back(diag[k]);
    out.first_components.push_back(z[k] * z[k]);
  }
  return out;
}

}  // namespace bathdisc
