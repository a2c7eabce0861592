#include "bathdisc/direct_disc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace bathdisc {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

DiscreteBath assemble(const SpectralDensity& J, const std::vector<double>& energies,
                      const std::vector<double>& weights, std::string tag,
                      std::vector<std::string> notes) {
  DiscreteBath bath;
  bath.method_tag = std::move(tag);
  bath.support_lower = J.lower();
  bath.support_upper = J.upper();
  std::vector<double> xs;
  std::vector<double> ws;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (weights[i] > 0.0) {
      xs.push_back(energies[i]);
      ws.push_back(weights[i]);
    } else {
      notes.push_back("dropped zero-weight mode at x=" + fmt(energies[i]));
    }
  }
  if (xs.empty()) throw NumericalError("discretization produced an empty bath (all weights zero)");
  bath.energies = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  bath.weights = Eigen::Map<const Eigen::VectorXd>(ws.data(), static_cast<Eigen::Index>(ws.size()));
  bath.notes = std::move(notes);
  return bath;
}

void require_count(int n) {
  if (n < 1) throw ConfigError("number of bath modes must be >= 1");
}

}  // namespace

void validate(const DiscreteBath& bath) {
  if (bath.energies.size() < 1) throw Error("discrete bath is empty");
  if (bath.energies.size() != bath.weights.size()) {
    throw Error("discrete bath energies/weights length mismatch");
  }
  for (Eigen::Index i = 0; i < bath.size(); ++i) {
    if (!(bath.weights[i] > 0.0) || !std::isfinite(bath.weights[i])) {
      throw Error("discrete bath weight must be positive");
    }
    if (!std::isfinite(bath.energies[i])) throw Error("discrete bath energy must be finite");
    if (i > 0 && !(bath.energies[i] > bath.energies[i - 1])) {
      throw Error("discrete bath energies must be strictly increasing");
    }
  }
}

DiscreteBath trapezoid_discretize(const SpectralDensity& J, int n) {
  require_count(n);
  const double a = J.lower();
  const double h = J.width() / n;
  std::vector<double> xs(n);
  std::vector<double> ws(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = a + (i + 0.5) * h;
    ws[i] = J(xs[i]) * h;
  }
  return assemble(J, xs, ws, "trapezoid", {});
}

DiscreteBath interval_discretize(const SpectralDensity& J, const IntervalPartition& partition) {
  const auto& bp = partition.breakpoints;
  if (bp.size() < 2) throw ConfigError("interval partition needs at least one interval");
  for (std::size_t i = 1; i < bp.size(); ++i) {
    if (!(bp[i] > bp[i - 1])) throw ConfigError("interval partition must be strictly increasing");
  }
  std::vector<double> xs;
  std::vector<double> ws;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const IntervalMoments m = interval_moments(J, bp[i], bp[i + 1]);
    if (m.mass > 0.0) {
      xs.push_back(std::clamp(m.first / m.mass, bp[i], bp[i + 1]));
    } else {
      xs.push_back(0.5 * (bp[i] + bp[i + 1]));
    }
    ws.push_back(m.mass);
  }
  return assemble(J, xs, ws, "interval", {});
}

IntervalPartition linear_partition(double a, double b, int n) {
  require_count(n);
  if (!(a < b)) throw ConfigError("linear_partition needs a < b");
  IntervalPartition p;
  p.breakpoints.resize(n + 1);
  for (int i = 0; i <= n; ++i) p.breakpoints[i] = a + (b - a) * i / n;
  p.breakpoints.back() = b;
  return p;
}

IntervalPartition log_partition(double a, double b, int n, double ratio, double accumulation) {
  require_count(n);
  if (!(a < b)) throw ConfigError("log_partition needs a < b");
  if (!(ratio > 1.0)) throw ConfigError("log_partition needs ratio > 1");
  if (!(accumulation >= a && accumulation <= b)) {
    throw ConfigError("log_partition accumulation point must lie in [a, b]");
  }
  if (n == 1) return IntervalPartition{{a, b}};

  const double left_len = accumulation - a;
  const double right_len = b - accumulation;
  int left = 0;
  if (left_len > 0.0 && right_len > 0.0) {
    left = static_cast<int>(std::lround(n * left_len / (b - a)));
    left = std::clamp(left, 1, n - 1);
  } else if (left_len > 0.0) {
    left = n;
  }
  const int right = n - left;

  // Distance from the accumulation point after k of m outer intervals, with
  // widths c r^0, c r^-1, ..., c r^-(m-1) summing to len.
  auto distance = [ratio](double len, int m, int k) {
    const double rm = std::pow(ratio, -m);
    return len * (std::pow(ratio, -k) - rm) / (1.0 - rm);
  };

  IntervalPartition p;
  for (int k = 0; k < left; ++k) p.breakpoints.push_back(accumulation - distance(left_len, left, k));
  p.breakpoints.push_back(accumulation);
  for (int k = right - 1; k >= 0; --k) {
    p.breakpoints.push_back(accumulation + distance(right_len, right, k));
  }
  p.breakpoints.front() = a;
  p.breakpoints.back() = b;
  return p;
}

DiscreteBath mean_method(const SpectralDensity& J, int n) {
  require_count(n);
  struct Interval {
    double lo;
    double hi;
  };
  std::deque<Interval> queue{{J.lower(), J.upper()}};
  std::vector<double> energies;
  while (!queue.empty() && static_cast<int>(energies.size()) < n) {
    const Interval iv = queue.front();
    queue.pop_front();
    if (!(iv.hi > iv.lo)) continue;
    const IntervalMoments m = interval_moments(J, iv.lo, iv.hi);
    if (!(m.mass > 0.0)) continue;  // branch halts
    const double x = std::clamp(m.first / m.mass, iv.lo, iv.hi);
    energies.push_back(x);
    queue.push_back({iv.lo, x});
    queue.push_back({x, iv.hi});
  }
  if (static_cast<int>(energies.size()) < n) {
    throw NumericalError("mean method can place only " + std::to_string(energies.size()) +
                         " energies for this density");
  }
  std::sort(energies.begin(), energies.end());

  std::vector<double> weights(n);
  for (int i = 0; i < n; ++i) {
    const double lo = i == 0 ? J.lower() : 0.5 * (energies[i - 1] + energies[i]);
    const double hi = i + 1 == n ? J.upper() : 0.5 * (energies[i] + energies[i + 1]);
    weights[i] = interval_weight(J, lo, hi);
  }
  return assemble(J, energies, weights, "mean(breadth-first)", {});
}

DiscreteBath equal_weight_method(const SpectralDensity& J, int n) {
  require_count(n);
  const double total = total_weight(J);
  if (!(total > 0.0)) throw NumericalError("equal-weight method needs a density with positive mass");
  const double a = J.lower();
  const double b = J.upper();
  const double tol = 1e-13 * (b - a);

  IntervalPartition partition;
  partition.breakpoints.push_back(a);
  double left = a;
  double mass_left = 0.0;  // int_a^left J
  for (int k = 1; k < n; ++k) {
    const double target = total * k / n;
    // Leftmost x with int_a^x J >= target: invariant F(lo) < target <= F(hi).
    double lo = left;
    double hi = b;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (mass_left + interval_weight(J, left, mid) >= target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    if (hi <= partition.breakpoints.back()) {
      throw NumericalError("equal-weight breakpoints collapsed; increase precision or reduce n");
    }
    partition.breakpoints.push_back(hi);
    mass_left += interval_weight(J, left, hi);
    left = hi;
  }
  partition.breakpoints.push_back(b);
  DiscreteBath bath = interval_discretize(J, partition);
  bath.method_tag = "equal_weight";
  return bath;
}

}  // namespace bathdisc
