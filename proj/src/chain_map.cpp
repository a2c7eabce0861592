#include "bathdisc/chain_map.hpp"

#include "bathdisc/tridiagonal.hpp"

#include <sstream>

namespace bathdisc {

namespace {

template <typename Real>
ChainCoefficients run_lanczos(const DiscreteBath& bath) {
  using std::sqrt;
  const auto n = static_cast<std::size_t>(bath.size());
  std::vector<Real> energies(n);
  std::vector<Real> start(n);
  Real total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    energies[i] = Real(bath.energies[static_cast<Eigen::Index>(i)]);
    total += Real(bath.weights[static_cast<Eigen::Index>(i)]);
  }
  const Real v_tot = sqrt(total);
  for (std::size_t i = 0; i < n; ++i) {
    start[i] = sqrt(Real(bath.weights[static_cast<Eigen::Index>(i)])) / v_tot;
  }
  const LanczosState<Real> st = lanczos_diagonal(energies, std::move(start), static_cast<int>(n));

  ChainCoefficients chain;
  chain.v_tot = static_cast<double>(v_tot);
  chain.alphas.resize(static_cast<Eigen::Index>(st.alphas.size()));
  chain.betas.resize(static_cast<Eigen::Index>(st.betas.size()));
  for (std::size_t i = 0; i < st.alphas.size(); ++i) chain.alphas[i] = static_cast<double>(st.alphas[i]);
  for (std::size_t i = 0; i < st.betas.size(); ++i) chain.betas[i] = static_cast<double>(st.betas[i]);
  if (st.breakdown) {
    std::ostringstream os;
    os << "Lanczos breakdown after " << st.alphas.size() << " of " << n
       << " steps (degenerate or duplicated bath energies)";
    chain.notes.push_back(os.str());
  }
  return chain;
}

}  // namespace

ChainCoefficients lanczos_tridiagonalize(const DiscreteBath& bath, Precision precision) {
  validate(bath);
  const Precision p = effective_precision(static_cast<int>(bath.size()), precision);
  ChainCoefficients chain =
      p == Precision::Extended ? run_lanczos<ExtendedReal>(bath) : run_lanczos<double>(bath);
  chain.notes.push_back("precision=" + to_string(p));
  return chain;
}

DiscreteBath star_from_chain(const ChainCoefficients& chain) {
  if (chain.length() < 1) throw ConfigError("star_from_chain: empty chain");
  if (chain.betas.size() != chain.alphas.size() - 1) {
    throw ConfigError("star_from_chain: need N alphas and N-1 betas");
  }
  std::vector<double> diag(chain.alphas.data(), chain.alphas.data() + chain.alphas.size());
  std::vector<double> off(chain.betas.size());
  for (Eigen::Index i = 0; i < chain.betas.size(); ++i) {
    if (!(chain.betas[i] > 0.0)) throw ConfigError("star_from_chain: betas must be positive");
    off[static_cast<std::size_t>(i)] = std::sqrt(chain.betas[i]);
  }
  const auto spec = tridiagonal_first_row<double>(std::move(diag), std::move(off));
  const double v2 = chain.v_tot * chain.v_tot;

  DiscreteBath bath;
  bath.method_tag = "star_from_chain";
  std::vector<double> xs;
  std::vector<double> ws;
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    const double w = v2 * spec.first_components[i];
    if (w > 0.0) {
      xs.push_back(spec.eigenvalues[i]);
      ws.push_back(w);
    } else {
      std::ostringstream os;
      os.precision(17);
      os << "dropped zero-weight mode at x=" << spec.eigenvalues[i];
      bath.notes.push_back(os.str());
    }
  }
  if (xs.empty()) throw NumericalError("star_from_chain produced an empty bath");
  bath.energies = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  bath.weights = Eigen::Map<const Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  bath.support_lower = xs.front();
  bath.support_upper = xs.back();
  return bath;
}

}  // namespace bathdisc
