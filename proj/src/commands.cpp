#include "bathdisc/commands.hpp"

#include "bathdisc/bath_io.hpp"
#include "bathdisc/chain_map.hpp"
#include "bathdisc/many_body.hpp"
#include "bathdisc/master_eq.hpp"
#include "bathdisc/ortho_quad.hpp"
#include "bathdisc/sp_evolve.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace bathdisc {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  return os;
}

HeaderLines headers(const RunConfig& config, const std::string& command) {
  return {"config_hash=" + config.hash,
          "provenance=bathdisc " + command + " method=" + to_string(config.method)};
}

const SpectralDensity& require_density(const RunConfig& config) {
  if (!config.density) throw ConfigError("missing key 'density'");
  return *config.density;
}

int single_n_b(const RunConfig& config, const std::string& command) {
  if (config.n_b.size() != 1) {
    throw ConfigError("n_b: '" + command + "' takes a single value (use tmax-scan for sweeps)");
  }
  return config.n_b.front();
}

SingleParticleModel make_model(const RunConfig& config, double eps0, const DiscreteBath& bath) {
  if (config.geometry == Geometry::Chain) {
    return SingleParticleModel{eps0, lanczos_tridiagonalize(bath, config.precision)};
  }
  return SingleParticleModel{eps0, bath};
}

TimeGrid make_grid(const RunConfig& config, const SystemSpectrum& spectrum) {
  return config.dt ? TimeGrid::until(config.t_end, *config.dt) : default_grid(spectrum, config.t_end);
}

// Largest sample with t < t_limit.
double max_before(const RealSeries& s, double t_limit) {
  double m = 0.0;
  for (std::size_t k = 0; k < s.grid.count && s.grid.t(k) < t_limit; ++k) {
    m = std::max(m, s.values[static_cast<Eigen::Index>(k)]);
  }
  return m;
}

double detect_tmax(const RunConfig& config, const RealSeries& err) {
  return config.detector == TmaxDetector::Absolute ? tmax_empirical(err, config.threshold)
                                                    : tmax_relative(err, config.relative_factor);
}

std::string detector_name(const RunConfig& config) {
  return config.detector == TmaxDetector::Absolute
             ? "absolute threshold=" + format_real(config.threshold)
             : "relative factor=" + format_real(config.relative_factor);
}

// Every stride-th sample of a fine series.
Eigen::VectorXcd subsample(const Eigen::VectorXcd& v, int stride, std::size_t count) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    out[static_cast<Eigen::Index>(k)] = v[static_cast<Eigen::Index>(k * static_cast<std::size_t>(stride))];
  }
  return out;
}

void base_manifest(Manifest& m, const RunConfig& config, const std::string& command) {
  m.set("command", command);
  m.set("config_hash", config.hash);
  m.set("method", to_string(config.method));
  m.set("precision", to_string(config.precision));
  m.set("density", config.density ? config.density->describe() : "none");
}

}  // namespace

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_real(value)); }

void Manifest::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

void Manifest::add_note(const std::string& note) {
  entries_.emplace_back("note." + std::to_string(notes_++), note);
}

void Manifest::write(const fs::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  for (const auto& [k, v] : entries_) os << k << '=' << v << '\n';
}

void cmd_discretize(const RunConfig& config, const fs::path& out_dir) {
  const SpectralDensity& J = require_density(config);
  fs::create_directories(out_dir);
  Manifest m;
  base_manifest(m, config, "discretize");
  const bool single = config.n_b.size() == 1;
  for (int n : config.n_b) {
    if (n < 1) throw ConfigError("n_b: discretize needs values >= 1");
    const std::string suffix = single ? "" : "_N" + std::to_string(n);
    const DiscreteBath bath = discretize(config, n);
    auto os = open_output(out_dir, "bath" + suffix + ".txt");
    write_bath(os, bath, headers(config, "discretize"));
    if (config.method == Method::Bsdo) {
      const ChainCoefficients chain = chain_from_weight(J, n, config.precision);
      auto cs = open_output(out_dir, "chain" + suffix + ".txt");
      write_chain(cs, chain, headers(config, "discretize"));
    }
    m.set("N_b" + suffix, static_cast<long long>(bath.size()));
    m.set("total_weight" + suffix, bath.total_weight());
    for (const auto& note : bath.notes) m.add_note(note);
  }
  m.set("total_weight_continuous", total_weight(J));
  m.write(out_dir / "manifest.txt");
}

void cmd_evolve(const RunConfig& config, const fs::path& out_dir) {
  const SpectralDensity& J = require_density(config);
  const int n = single_n_b(config, "evolve");
  fs::create_directories(out_dir);
  const HeaderLines hdr = headers(config, "evolve");

  std::optional<DiscreteBath> bath;
  SingleParticleModel model = SingleParticleModel::isolated(config.eps0);
  if (n > 0) {
    bath = discretize(config, n);
    model = make_model(config, config.eps0, *bath);
    auto os = open_output(out_dir, "bath.txt");
    write_bath(os, *bath, hdr);
  }
  const SystemSpectrum spectrum = system_spectrum(model);
  const TimeGrid grid = make_grid(config, spectrum);
  const TimeSeries g = greens_function(spectrum, grid);
  const RealSeries p = population(g);
  const ReferenceSolution ref = reference_solution(J, config.eps0, grid, config.n_ref);
  const RealSeries err = error_series(ref.population, p);

  {
    auto os = open_output(out_dir, "greens.csv");
    write_series(os, g, hdr);
  }
  {
    auto os = open_output(out_dir, "population.csv");
    write_series(os, p, hdr);
  }
  {
    auto os = open_output(out_dir, "reference_population.csv");
    write_series(os, ref.population, hdr);
  }
  {
    auto os = open_output(out_dir, "error.csv");
    write_series(os, err, hdr);
  }
  {
    auto os = open_output(out_dir, "lambda_continuous.csv");
    write_series(os, lambda_time(J, grid), hdr);
  }
  if (bath) {
    auto os = open_output(out_dir, "lambda_discrete.csv");
    write_series(os, lambda_time_discrete(*bath, grid), hdr);
  }

  Manifest m;
  base_manifest(m, config, "evolve");
  m.set("N_b", static_cast<long long>(n));
  m.set("eps0", config.eps0);
  m.set("geometry", config.geometry == Geometry::Star ? "star" : "chain");
  m.set("dt", grid.dt);
  m.set("t_end", grid.t_end());
  m.set("n_ref", static_cast<long long>(ref.n_ref));
  m.set("reference_defect", ref.certified_defect);
  m.set("detector", detector_name(config));
  const double t_emp = detect_tmax(config, err);
  m.set("t_max_empirical", t_emp);
  if (n > 0) {
    const double t_sys = tmax_predict(n, J.lower(), J.upper(), TmaxKind::System);
    m.set("t_max_predicted_bath", tmax_predict(n, J.lower(), J.upper(), TmaxKind::Bath));
    m.set("t_max_predicted_system", t_sys);
    m.set("max_error_before_tmax", max_before(err, t_sys));
  } else {
    m.set("t_max_predicted_bath", "n/a");
    m.set("t_max_predicted_system", "n/a");
  }
  m.set("max_error", err.values.maxCoeff());
  if (bath) {
    for (const auto& note : bath->notes) m.add_note(note);
  }
  m.write(out_dir / "manifest.txt");
}

void cmd_tmax_scan(const RunConfig& config, const fs::path& out_dir) {
  const SpectralDensity& J = require_density(config);
  fs::create_directories(out_dir);
  const HeaderLines hdr = headers(config, "tmax-scan");
  for (int n : config.n_b) {
    if (n < 1) throw ConfigError("n_b: tmax-scan needs values >= 1");
  }
  // One grid for the whole sweep, resolving the largest bath.
  const int n_max = *std::max_element(config.n_b.begin(), config.n_b.end());
  const SystemSpectrum widest = system_spectrum(make_model(config, config.eps0, discretize(config, n_max)));
  const TimeGrid grid = make_grid(config, widest);
  const ReferenceSolution ref = reference_solution(J, config.eps0, grid, config.n_ref);

  std::ostringstream rows;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n : config.n_b) {  // sequential; rows in configured order
    const DiscreteBath bath = discretize(config, n);
    const RealSeries p = population(make_model(config, config.eps0, bath), grid);
    const RealSeries err = error_series(ref.population, p);
    const double t_emp = detect_tmax(config, err);
    const double t_pred = tmax_predict(n, J.lower(), J.upper(), TmaxKind::System);
    rows << to_string(config.method) << ',' << n << ',' << format_real(t_emp) << ','
         << format_real(t_pred) << ',' << format_real(max_before(err, t_pred)) << '\n';
    if (std::isfinite(t_emp)) {
      xs.push_back(n);
      ys.push_back(t_emp);
    }
  }
  {
    auto os = open_output(out_dir, "tmax_scan.csv");
    for (const auto& line : hdr) os << "# " << line << '\n';
    os << "method,N_b,t_max_empirical,t_max_predicted,max_error_before_tmax\n" << rows.str();
  }
  Manifest m;
  base_manifest(m, config, "tmax-scan");
  m.set("dt", grid.dt);
  m.set("t_end", grid.t_end());
  m.set("n_ref", static_cast<long long>(ref.n_ref));
  m.set("reference_defect", ref.certified_defect);
  m.set("detector", detector_name(config));
  m.set("slope_predicted", 4.0 / J.width());
  if (xs.size() >= 2) {
    const Eigen::Index k = static_cast<Eigen::Index>(xs.size());
    Eigen::MatrixXd a(k, 2);
    Eigen::VectorXd y(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      a(i, 0) = xs[static_cast<std::size_t>(i)];
      a(i, 1) = 1.0;
      y[i] = ys[static_cast<std::size_t>(i)];
    }
    const Eigen::Vector2d fit = a.colPivHouseholderQr().solve(y);
    m.set("slope_empirical", fit[0]);
    m.set("intercept_empirical", fit[1]);
  } else {
    m.set("slope_empirical", "n/a");
  }
  m.write(out_dir / "manifest.txt");
}

void cmd_mastereq(const RunConfig& config, const fs::path& out_dir) {
  const SpectralDensity& J = require_density(config);
  const int n = single_n_b(config, "mastereq");
  if (n < 1) throw ConfigError("n_b: mastereq needs a value >= 1");
  fs::create_directories(out_dir);
  const HeaderLines hdr = headers(config, "mastereq");

  const TimeGrid grid = TimeGrid::until(config.t_end, config.dt.value_or(0.01));
  const TimeGrid fine = correlation_grid(grid);
  const DiscreteBath bath = discretize(config, n);
  const double beta = config.inverse_temperature;
  const BathCorrelation cont = correlation_functions(J, beta, fine);
  const BathCorrelation disc = correlation_functions(bath, beta, fine);
  const TimeSeries gamma_c = gamma_integral(cont, config.omega_s);
  const TimeSeries gamma_d = gamma_integral(disc, config.omega_s);
  MeOptions opts;
  opts.coupling = config.coupling;
  const MeSolution me_c = integrate_me(config.omega_s, cont, grid, opts);
  const MeSolution me_d = integrate_me(config.omega_s, disc, grid, opts);

  const int stride = kCorrelationRefinement;
  const Eigen::VectorXcd a1c = subsample(cont.alpha1.values, stride, grid.count);
  const Eigen::VectorXcd a2c = subsample(cont.alpha2.values, stride, grid.count);
  const Eigen::VectorXcd a1d = subsample(disc.alpha1.values, stride, grid.count);
  const Eigen::VectorXcd a2d = subsample(disc.alpha2.values, stride, grid.count);
  const Eigen::VectorXcd gc = subsample(gamma_c.values, stride, grid.count);
  const Eigen::VectorXcd gd = subsample(gamma_d.values, stride, grid.count);
  {
    auto os = open_output(out_dir, "correlation.csv");
    write_table(os, grid,
                {{"alpha1_cont_re", a1c.real()}, {"alpha1_cont_im", a1c.imag()},
                 {"alpha2_cont_re", a2c.real()}, {"alpha2_cont_im", a2c.imag()},
                 {"alpha1_disc_re", a1d.real()}, {"alpha1_disc_im", a1d.imag()},
                 {"alpha2_disc_re", a2d.real()}, {"alpha2_disc_im", a2d.imag()}},
                hdr);
  }
  {
    auto os = open_output(out_dir, "gamma.csv");
    write_table(os, grid,
                {{"gamma_cont_re", gc.real()}, {"gamma_cont_im", gc.imag()},
                 {"gamma_disc_re", gd.real()}, {"gamma_disc_im", gd.imag()}},
                hdr);
  }
  {
    auto os = open_output(out_dir, "me.csv");
    write_table(os, grid,
                {{"population_cont", me_c.population.values}, {"coherence_cont", me_c.coherence.values},
                 {"population_disc", me_d.population.values}, {"coherence_disc", me_d.coherence.values}},
                hdr);
  }

  const double t_bath = tmax_predict(n, J.lower(), J.upper(), TmaxKind::Bath);
  const RealSeries gamma_err{grid, (gc - gd).cwiseAbs()};
  const RealSeries pop_err{grid, (me_c.population.values - me_d.population.values).cwiseAbs()};
  Manifest m;
  base_manifest(m, config, "mastereq");
  m.set("N_b", static_cast<long long>(n));
  m.set("omega_s", config.omega_s);
  m.set("inverse_temperature", beta);
  m.set("coupling", config.coupling == CouplingOperator::SigmaX ? "sigma_x" : "sigma_minus");
  m.set("dt", grid.dt);
  m.set("t_end", grid.t_end());
  m.set("t_max_bath", t_bath);
  m.set("max_abs_gamma", gc.cwiseAbs().maxCoeff());
  m.set("max_gamma_defect_before_tmax", max_before(gamma_err, t_bath));
  m.set("max_population_defect_before_tmax", max_before(pop_err, t_bath));
  m.set("max_gamma_defect", gamma_err.values.maxCoeff());
  m.set("max_population_defect", pop_err.values.maxCoeff());
  m.set("halving_defect_cont", me_c.halving_defect);
  m.set("halving_defect_disc", me_d.halving_defect);
  m.set("max_trace_error", std::max(me_c.max_trace_error, me_d.max_trace_error));
  m.write(out_dir / "manifest.txt");
}

void cmd_manybody(const RunConfig& config, const fs::path& out_dir) {
  const int n = single_n_b(config, "manybody");
  fs::create_directories(out_dir);
  const HeaderLines hdr = headers(config, "manybody");

  std::optional<DiscreteBath> bath;
  SiamModel model = atomic_siam(config.interaction, config.eps0);
  if (n > 0) {
    bath = discretize(config, n);
    model = build_siam(config.interaction, *bath, config.eps0);
  }
  const GroundState gs = ground_state(model);
  const TimeGrid grid = TimeGrid::until(config.t_end, config.dt.value_or(0.01));
  const GreensOverlap go = greens_overlap(model, gs, grid);
  {
    auto os = open_output(out_dir, "greens.csv");
    write_table(os, grid,
                {{"re", go.values.values.real()},
                 {"im", go.values.values.imag()},
                 {"abs", go.values.values.cwiseAbs()}},
                hdr);
  }
  const TimeSeries retarded = retarded_greens(go, hole_overlap(model, gs, grid));
  {
    auto os = open_output(out_dir, "retarded_greens.csv");
    write_table(os, grid,
                {{"re", retarded.values.real()},
                 {"im", retarded.values.imag()},
                 {"abs", retarded.values.cwiseAbs()}},
                hdr);
  }
  Manifest m;
  base_manifest(m, config, "manybody");
  m.set("N_b", static_cast<long long>(n));
  m.set("U", config.interaction);
  m.set("impurity_level", config.eps0);
  m.set("ground_energy", gs.energy);
  m.set("ground_residual", gs.residual);
  m.set("ground_sector", std::to_string(gs.state.basis.sector().up) + "," +
                             std::to_string(gs.state.basis.sector().down));
  m.set("propagation_sector", std::to_string(go.sector.up) + "," + std::to_string(go.sector.down));
  m.set("overlap_weight", go.weight);
  m.set("max_krylov_dimension", static_cast<long long>(go.max_krylov_dimension));
  m.set("max_norm_drift", go.max_norm_drift);
  for (const auto& note : gs.notes) m.add_note(note);

  if (config.interaction == 0.0 && bath) {
    // Quadratic oracle: fill the lowest N_up single-particle levels.
    const SystemSpectrum sp = system_spectrum(SingleParticleModel{config.eps0, *bath});
    const int filled = gs.state.basis.sector().up;
    const Eigen::Index size = sp.energies.size();
    double fermi = -std::numeric_limits<double>::infinity();
    if (filled > 0 && filled < size) {
      fermi = 0.5 * (sp.energies[filled - 1] + sp.energies[filled]);
    } else if (filled >= size) {
      fermi = std::numeric_limits<double>::infinity();
    }
    const TimeSeries oracle = particle_overlap(sp, grid, fermi);
    const double dev = (oracle.values - go.values.values).cwiseAbs().maxCoeff();
    m.set("quadratic_oracle_max_deviation", dev);
  }
  m.write(out_dir / "manifest.txt");
}

void cmd_compare(const fs::path& first, const fs::path& second, const fs::path& out_dir) {
  auto load = [](const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open '" + p.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string text_a = load(first);
  const std::string text_b = load(second);
  std::istringstream ia(text_a);
  std::istringstream ib(text_b);
  const Table a = read_table(ia);
  const Table b = read_table(ib);
  auto value_column = [](const Table& t, const fs::path& p) -> std::size_t {
    if (t.names.empty() || t.names[0] != "t") throw ConfigError("'" + p.string() + "': first column must be t");
    for (std::size_t i = 1; i < t.names.size(); ++i) {
      if (t.names[i] == "value" || t.names[i] == "error") return i;
    }
    if (t.names.size() < 2) throw ConfigError("'" + p.string() + "': no value column");
    return 1;
  };
  const std::size_t ca = value_column(a, first);
  const std::size_t cb = value_column(b, second);
  if (a.rows.size() != b.rows.size()) throw ConfigError("compare: the two series have different grids");
  fs::create_directories(out_dir);
  auto os = open_output(out_dir, "compare.csv");
  os << "# inputs_hash=" << fnv1a_hex(text_a + '\0' + text_b) << '\n';
  os << "# provenance=bathdisc compare\n";
  os << "t,first,second,ratio\n";
  double max_a = 0.0;
  double max_b = 0.0;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const double t = a.rows[k][0];
    if (std::abs(t - b.rows[k][0]) > 1e-12 * std::max(1.0, std::abs(t))) {
      throw ConfigError("compare: the two series have different grids");
    }
    const double va = a.rows[k][ca];
    const double vb = b.rows[k][cb];
    max_a = std::max(max_a, va);
    max_b = std::max(max_b, vb);
    os << format_real(t) << ',' << format_real(va) << ',' << format_real(vb) << ','
       << format_real(vb != 0.0 ? va / vb : std::numeric_limits<double>::infinity()) << '\n';
  }
  Manifest m;
  m.set("command", "compare");
  m.set("first", first.filename().string());
  m.set("second", second.filename().string());
  m.set("max_first", max_a);
  m.set("max_second", max_b);
  m.write(out_dir / "manifest.txt");
}

int run_command(const std::string& name, const CommandOptions& options) {
  try {
    if (name == "compare") {
      if (options.inputs.size() != 2) throw ConfigError("compare needs exactly two CSV inputs");
      cmd_compare(options.inputs[0], options.inputs[1], options.out.value_or("out"));
      return kExitOk;
    }
    if (!options.config) throw ConfigError("--config is required for '" + name + "'");
    RunConfig config = load_config(*options.config);
    if (options.precision) apply_precision_override(config, *options.precision);
    const fs::path out = options.out.value_or(fs::path(config.output));
    if (name == "discretize") {
      cmd_discretize(config, out);
    } else if (name == "evolve") {
      cmd_evolve(config, out);
    } else if (name == "tmax-scan") {
      cmd_tmax_scan(config, out);
    } else if (name == "mastereq") {
      cmd_mastereq(config, out);
    } else if (name == "manybody") {
      cmd_manybody(config, out);
    } else {
      throw ConfigError("unknown command '" + name + "'");
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what();
    if (!std::isnan(e.achieved())) std::cerr << " (achieved " << format_real(e.achieved()) << ')';
    std::cerr << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace bathdisc
