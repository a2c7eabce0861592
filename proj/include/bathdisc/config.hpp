#pragma once

#include "bathdisc/direct_disc.hpp"
#include "bathdisc/master_eq.hpp"
#include "bathdisc/precision.hpp"
#include "bathdisc/sp_evolve.hpp"
#include "bathdisc/spectral.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bathdisc {

enum class Method { Trapezoid, Linear, Log, Mean, EqualWeight, Bsdo, Legendre };

Method parse_method(const std::string& name);
std::string to_string(Method m);

enum class TmaxDetector { Absolute, Relative };

// Validated run configuration. Every key has a default except density.family.
struct RunConfig {
  std::optional<SpectralDensity> density;
  Method method = Method::Bsdo;
  std::vector<int> n_b{10};

  double log_ratio = 2.0;
  double log_accumulation = 0.0;

  double eps0 = 0.0;
  double interaction = 0.0;
  Geometry geometry = Geometry::Star;

  std::optional<double> dt;
  double t_end = 10.0;

  double threshold = 0.004;
  int n_ref = 5000;
  TmaxDetector detector = TmaxDetector::Absolute;
  double relative_factor = 100.0;

  Precision precision = Precision::Double;
  std::string output = "out";

  double omega_s = 0.5;
  double inverse_temperature = kZeroTemperature;
  CouplingOperator coupling = CouplingOperator::SigmaX;

  std::string canonical;  // sorted, whitespace-free JSON of the accepted input
  std::string hash;       // FNV-1a 64 of canonical, hex
};

// Parses and validates a JSON document. Unknown keys and type errors raise
// ConfigError naming the key path. Relative grid_file paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Re-hashes after command-line overrides so file headers reflect them.
void apply_precision_override(RunConfig& config, Precision precision);

// Discretizes the configured density with the configured method.
DiscreteBath discretize(const RunConfig& config, int n_b);
DiscreteBath discretize(const SpectralDensity& J, Method method, int n_b, const RunConfig& options);

std::string fnv1a_hex(const std::string& data);

}  // namespace bathdisc
