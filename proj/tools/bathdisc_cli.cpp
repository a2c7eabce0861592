#include "bathdisc/commands.hpp"

#include <CLI11.hpp>

#include <map>

int main(int argc, char** argv) {
  using namespace bathdisc;

  CLI::App app{"Bath discretization and impurity dynamics"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string precision;
  bool deterministic = false;
  std::vector<std::string> inputs;

  const std::map<std::string, std::string> summaries{
      {"discretize", "Discretize a spectral density into a star (and chain) file"},
      {"evolve", "Single-particle impurity dynamics against a quasi-continuum reference"},
      {"tmax-scan", "Empirical vs predicted t_max over a list of N_b"},
      {"mastereq", "Time-local master equation with continuum and discrete correlations"},
      {"manybody", "Single-impurity Anderson model Green's functions by exact diagonalization"},
      {"compare", "Join two time series on t and report their ratio"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, summaries.at(name));
    if (name == "compare") {
      sub->add_option("inputs", inputs, "Two CSV series to compare")->required()->expected(2);
    } else {
      sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
      sub->add_option("--precision", precision, "Override the configured precision")
          ->check(CLI::IsMember({"double", "extended"}));
    }
    sub->add_option("--out", out, "Output directory");
    sub->add_flag("--deterministic", deterministic, "Run sweeps sequentially in configured order");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CommandOptions options;
  if (!config.empty()) options.config = config;
  if (!out.empty()) options.out = out;
  if (!precision.empty()) options.precision = precision == "extended" ? Precision::Extended : Precision::Double;
  options.deterministic = deterministic;
  for (const auto& p : inputs) options.inputs.emplace_back(p);

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) return run_command(name, options);
  }
  return kExitConfig;
}
