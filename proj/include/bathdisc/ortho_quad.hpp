#pragma once

#include "bathdisc/direct_disc.hpp"
#include "bathdisc/precision.hpp"
#include "bathdisc/quadrature.hpp"
#include "bathdisc/spectral.hpp"
#include "bathdisc/tridiagonal.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace bathdisc {

enum class WeightKind { Bsdo, Unit };

// Three-term recurrence p_{n+1} = (x - alpha_n) p_n - beta_n p_{n-1} of the
// monic orthogonal polynomials of a weight w, with norm0 = int w.
struct RecurrenceCoefficients {
  Eigen::VectorXd alphas;  // alpha_0 .. alpha_{N-1}
  Eigen::VectorXd betas;   // beta_1 .. beta_{N-1}
  double norm0 = 0.0;
  WeightKind weight_tag = WeightKind::Bsdo;
  Precision precision = Precision::Double;
  std::vector<std::string> notes;

  int order() const { return static_cast<int>(alphas.size()); }
};

struct QuadratureRule {
  Eigen::VectorXd nodes;                // ascending
  Eigen::VectorXd christoffel_weights;  // positive, sum to norm
  double norm = 0.0;
};

// Chain geometry: system -- v_tot -- e_0 -- sqrt(beta_1) -- e_1 -- ...
struct ChainCoefficients {
  double v_tot = 0.0;
  Eigen::VectorXd alphas;  // on-site alpha_0 .. alpha_{N-1}
  Eigen::VectorXd betas;   // beta_1 .. beta_{N-1}; hoppings are sqrt(beta_n)
  std::vector<std::string> notes;

  int length() const { return static_cast<int>(alphas.size()); }
};

// ---------------------------------------------------------------------------
// Scalar-generic kernels.

// Discrete measure sum_i weights_i delta(x - nodes_i).
template <typename Real>
struct DiscreteMeasure {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

template <typename Real>
struct Recurrence {
  std::vector<Real> alphas;
  std::vector<Real> betas;  // beta_1 .. beta_{N-1}
  Real norm0 = 0;
};

// Composite Gauss-Legendre discretization of w: each smooth piece is cut into
// `panels` equal panels of kPanelOrder nodes; the panel touching an algebraic
// endpoint singularity is additionally graded geometrically toward it.
template <typename Real>
DiscreteMeasure<Real> discretize_measure(const SpectralDensity& w, int panels,
                                         int grading_levels = 48) {
  const auto& rule = gauss_legendre<Real>(kPanelOrder);
  const auto pieces = w.breakpoints();
  const auto singular = w.singular_points();
  auto is_singular = [&](double p) {
    for (double s : singular) {
      if (s == p) return true;
    }
    return false;
  };
  DiscreteMeasure<Real> m;
  auto add_panel = [&](const Real& lo, const Real& hi) {
    const Real half = (hi - lo) / 2;
    const Real mid = (hi + lo) / 2;
    for (int i = 0; i < kPanelOrder; ++i) {
      const Real x = mid + half * rule.nodes[i];
      const Real wx = half * rule.weights[i] * w(x);
      if (wx > Real(0)) {
        m.nodes.push_back(x);
        m.weights.push_back(wx);
      }
    }
  };
  for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
    const Real lo = pieces[p];
    const Real hi = pieces[p + 1];
    const Real h = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k) {
      const Real plo = lo + h * k;
      const Real phi = (k + 1 == panels) ? hi : lo + h * (k + 1);
      const bool grade_lo = k == 0 && is_singular(pieces[p]);
      const bool grade_hi = k + 1 == panels && is_singular(pieces[p + 1]);
      if (!grade_lo && !grade_hi) {
        add_panel(plo, phi);
        continue;
      }
      // Geometric panels [c r^{j+1}, c r^j] toward the singular end.
      const Real width = phi - plo;
      Real inner = width;
      for (int j = 0; j < grading_levels; ++j) {
        const Real outer = inner;
        inner = outer / 2;
        if (grade_lo) {
          add_panel(plo + inner, plo + outer);
        } else {
          add_panel(phi - outer, phi - inner);
        }
      }
      if (grade_lo) {
        add_panel(plo, plo + inner);
      } else {
        add_panel(phi - inner, phi);
      }
    }
  }
  return m;
}

// Stieltjes procedure on a discrete measure, carried out on orthonormal
// polynomial values so that no monic growth can overflow.
template <typename Real>
Recurrence<Real> stieltjes(const DiscreteMeasure<Real>& m, int n) {
  using std::sqrt;
  const std::size_t count = m.nodes.size();
  Recurrence<Real> rc;
  Real norm0 = 0;
  for (const Real& wi : m.weights) norm0 += wi;
  rc.norm0 = norm0;
  if (!(norm0 > Real(0))) throw NumericalError("Stieltjes procedure: weight has zero mass");

  std::vector<Real> q_prev(count, Real(0));
  std::vector<Real> q(count, Real(1) / sqrt(norm0));
  Real sqrt_beta = 0;
  for (int k = 0; k < n; ++k) {
    Real alpha = 0;
    for (std::size_t i = 0; i < count; ++i) alpha += m.weights[i] * m.nodes[i] * q[i] * q[i];
    rc.alphas.push_back(alpha);
    if (k + 1 == n) break;
    std::vector<Real> r(count);
    Real beta = 0;
    for (std::size_t i = 0; i < count; ++i) {
      r[i] = (m.nodes[i] - alpha) * q[i] - sqrt_beta * q_prev[i];
      beta += m.weights[i] * r[i] * r[i];
    }
    using std::isfinite;
    if (!(beta > Real(0)) || !isfinite(static_cast<double>(beta))) {
      std::ostringstream msg;
      msg << "Stieltjes recurrence became unstable at order " << (k + 1)
          << " (beta <= 0 or non-finite); use extended precision";
      throw NumericalError(msg.str());
    }
    rc.betas.push_back(beta);
    sqrt_beta = sqrt(beta);
    for (std::size_t i = 0; i < count; ++i) r[i] /= sqrt_beta;
    q_prev.swap(q);
    q.swap(r);
  }
  return rc;
}

// Nodes and Christoffel weights from the Jacobi matrix of a recurrence.
template <typename Real>
DiscreteMeasure<Real> gauss_rule(const Recurrence<Real>& rc) {
  using std::sqrt;
  std::vector<Real> off(rc.betas.size());
  for (std::size_t i = 0; i < off.size(); ++i) off[i] = sqrt(rc.betas[i]);
  const auto spec = tridiagonal_first_row<Real>(rc.alphas, off);
  DiscreteMeasure<Real> out;
  out.nodes = spec.eigenvalues;
  out.weights.resize(spec.first_components.size());
  for (std::size_t i = 0; i < out.weights.size(); ++i) {
    out.weights[i] = rc.norm0 * spec.first_components[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Public operations.

struct StieltjesOptions {
  double tolerance = 1e-13;  // max scaled coefficient change between refinements
  int max_doublings = 7;
  int extended_threshold = kExtendedPrecisionThreshold;
};

// Recurrence coefficients of the polynomials orthogonal with respect to w.
// Orders above options.extended_threshold run in extended precision regardless
// of the requested precision.
RecurrenceCoefficients stieltjes_recurrence(const SpectralDensity& w, int n,
                                            Precision precision = Precision::Double,
                                            const StieltjesOptions& options = {});

// Legendre coefficients for the unit weight on [a, b] in closed form.
RecurrenceCoefficients legendre_recurrence(double a, double b, int n);

QuadratureRule golub_welsch(const RecurrenceCoefficients& rc);

// Star bath with energies at the nodes and weights equal to the Christoffel
// weights of w = J.
DiscreteBath bsdo_discretize(const SpectralDensity& J, int n,
                             Precision precision = Precision::Double);

// Gauss-Legendre nodes on [a, b] with weights W_n J(x_n).
DiscreteBath legendre_discretize(const SpectralDensity& J, int n);

ChainCoefficients chain_from_weight(const SpectralDensity& J, int n,
                                    Precision precision = Precision::Double);

}  // namespace bathdisc
