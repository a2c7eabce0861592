#include "bathdisc/ortho_quad.hpp"

#include <algorithm>
#include <cmath>

namespace bathdisc {

namespace {

// Stieltjes on successively doubled panel counts until the coefficients stop
// moving. Changes are scaled by the support width (alpha) and its square (beta).
template <typename Real>
Recurrence<Real> converged_stieltjes(const SpectralDensity& w, int n,
                                     const StieltjesOptions& options) {
  const double width = w.width();
  int panels = std::max(1, static_cast<int>(std::ceil(4.0 * n / kPanelOrder)));
  Recurrence<Real> prev = stieltjes(discretize_measure<Real>(w, panels), n);
  double change = 0.0;
  for (int d = 0; d < options.max_doublings; ++d) {
    panels *= 2;
    Recurrence<Real> cur = stieltjes(discretize_measure<Real>(w, panels), n);
    change = 0.0;
    for (std::size_t k = 0; k < cur.alphas.size(); ++k) {
      change = std::max(change, static_cast<double>(abs(cur.alphas[k] - prev.alphas[k])) / width);
    }
    for (std::size_t k = 0; k < cur.betas.size(); ++k) {
      change = std::max(change,
                        static_cast<double>(abs(cur.betas[k] - prev.betas[k])) / (width * width));
    }
    if (change < options.tolerance) return cur;
    prev = std::move(cur);
  }
  throw NumericalError("Stieltjes coefficients did not converge under panel refinement", change);
}

template <typename Real>
RecurrenceCoefficients to_public(const Recurrence<Real>& rc, WeightKind tag, Precision p) {
  RecurrenceCoefficients out;
  out.alphas.resize(static_cast<Eigen::Index>(rc.alphas.size()));
  out.betas.resize(static_cast<Eigen::Index>(rc.betas.size()));
  for (std::size_t i = 0; i < rc.alphas.size(); ++i) out.alphas[i] = static_cast<double>(rc.alphas[i]);
  for (std::size_t i = 0; i < rc.betas.size(); ++i) out.betas[i] = static_cast<double>(rc.betas[i]);
  out.norm0 = static_cast<double>(rc.norm0);
  out.weight_tag = tag;
  out.precision = p;
  return out;
}

template <typename Real>
DiscreteBath bath_from_rule(const SpectralDensity& J, const DiscreteMeasure<Real>& rule,
                            std::string tag) {
  DiscreteBath bath;
  bath.method_tag = std::move(tag);
  bath.support_lower = J.lower();
  bath.support_upper = J.upper();
  const auto n = static_cast<Eigen::Index>(rule.nodes.size());
  bath.energies.resize(n);
  bath.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    bath.energies[i] = static_cast<double>(rule.nodes[i]);
    bath.weights[i] = static_cast<double>(rule.weights[i]);
  }
  return bath;
}

void require_order(int n) {
  if (n < 1) throw ConfigError("recurrence order must be >= 1");
}

}  // namespace

RecurrenceCoefficients stieltjes_recurrence(const SpectralDensity& w, int n, Precision precision,
                                            const StieltjesOptions& options) {
  require_order(n);
  const Precision p = effective_precision(n, precision, options.extended_threshold);
  const WeightKind tag = std::holds_alternative<Flat>(w.family()) ? WeightKind::Unit
                                                                  : WeightKind::Bsdo;
  RecurrenceCoefficients rc =
      p == Precision::Extended
          ? to_public(converged_stieltjes<ExtendedReal>(w, n, options), tag, p)
          : to_public(converged_stieltjes<double>(w, n, options), tag, p);
  if (p != precision) rc.notes.push_back("order above threshold; promoted to extended precision");
  return rc;
}

RecurrenceCoefficients legendre_recurrence(double a, double b, int n) {
  require_order(n);
  if (!(a < b)) throw ConfigError("legendre_recurrence needs a < b");
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  RecurrenceCoefficients rc;
  rc.alphas = Eigen::VectorXd::Constant(n, c);
  rc.betas.resize(n - 1);
  for (int k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k) * k;
    rc.betas[k - 1] = h * h * kk / (4.0 * kk - 1.0);
  }
  rc.norm0 = b - a;
  rc.weight_tag = WeightKind::Unit;
  return rc;
}

QuadratureRule golub_welsch(const RecurrenceCoefficients& rc) {
  if (rc.order() < 1) throw ConfigError("golub_welsch: empty recurrence");
  if (rc.betas.size() != rc.alphas.size() - 1) {
    throw ConfigError("golub_welsch: need N alphas and N-1 betas");
  }
  Recurrence<double> r;
  r.alphas.assign(rc.alphas.data(), rc.alphas.data() + rc.alphas.size());
  r.betas.assign(rc.betas.data(), rc.betas.data() + rc.betas.size());
  for (double b : r.betas) {
    if (!(b > 0.0)) throw ConfigError("golub_welsch: betas must be positive");
  }
  r.norm0 = rc.norm0;
  const auto g = gauss_rule(r);
  QuadratureRule out;
  out.nodes = Eigen::Map<const Eigen::VectorXd>(g.nodes.data(), static_cast<Eigen::Index>(g.nodes.size()));
  out.christoffel_weights =
      Eigen::Map<const Eigen::VectorXd>(g.weights.data(), static_cast<Eigen::Index>(g.weights.size()));
  out.norm = rc.norm0;
  return out;
}

DiscreteBath bsdo_discretize(const SpectralDensity& J, int n, Precision precision) {
  require_order(n);
  const StieltjesOptions options;
  const Precision p = effective_precision(n, precision, options.extended_threshold);
  DiscreteBath bath =
      p == Precision::Extended
          ? bath_from_rule(J, gauss_rule(converged_stieltjes<ExtendedReal>(J, n, options)), "bsdo")
          : bath_from_rule(J, gauss_rule(converged_stieltjes<double>(J, n, options)), "bsdo");
  bath.notes.push_back("precision=" + to_string(p));
  return bath;
}

DiscreteBath legendre_discretize(const SpectralDensity& J, int n) {
  const QuadratureRule rule = golub_welsch(legendre_recurrence(J.lower(), J.upper(), n));
  std::vector<double> xs;
  std::vector<double> ws;
  DiscreteBath bath;
  bath.method_tag = "legendre";
  bath.support_lower = J.lower();
  bath.support_upper = J.upper();
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double w = rule.christoffel_weights[i] * J(rule.nodes[i]);
    if (w > 0.0) {
      xs.push_back(rule.nodes[i]);
      ws.push_back(w);
    } else {
      std::ostringstream os;
      os.precision(17);
      os << "dropped zero-weight mode at x=" << rule.nodes[i];
      bath.notes.push_back(os.str());
    }
  }
  if (xs.empty()) throw NumericalError("discretization produced an empty bath (all weights zero)");
  bath.energies = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  bath.weights = Eigen::Map<const Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  return bath;
}

ChainCoefficients chain_from_weight(const SpectralDensity& J, int n, Precision precision) {
  const RecurrenceCoefficients rc = stieltjes_recurrence(J, n, precision);
  ChainCoefficients chain;
  chain.v_tot = std::sqrt(total_weight(J));
  chain.alphas = rc.alphas;
  chain.betas = rc.betas;
  chain.notes = rc.notes;
  return chain;
}

}  // namespace bathdisc
