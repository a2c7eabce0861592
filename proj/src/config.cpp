#include "bathdisc/config.hpp"

#include "bathdisc/ortho_quad.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bathdisc {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Typed accessors that report the full key path on failure.
class Section {
 public:
  Section(const json& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
    for (const auto& [key, value] : node_.items()) {
      if (!allowed.contains(key)) throw ConfigError("unknown key '" + join(path_, key) + "'");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return number(key);
  }
  double number(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_number()) throw ConfigError(join(path_, key) + ": expected a number");
    return v.get<double>();
  }
  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer");
    return v.get<int>();
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return text(key);
  }
  std::string text(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_string()) throw ConfigError(join(path_, key) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) const {
    const json& v = require(key);
    if (!v.is_array()) throw ConfigError(join(path_, key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(join(path_, key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  Section child(const std::string& key, const std::set<std::string>& allowed) const {
    return Section(node_.at(key), join(path_, key), allowed);
  }
  std::string where(const std::string& key) const { return join(path_, key); }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }
  const json& require(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing key '" + join(path_, key) + "'");
    return node_.at(key);
  }

  const json& node_;
  std::string path_;
};

SpectralDensity parse_density(const Section& d, const std::filesystem::path& base_dir) {
  const std::string family = d.text("family");
  auto support = [&]() -> std::pair<double, double> {
    const auto s = d.numbers("support");
    if (s.size() != 2) throw ConfigError(d.where("support") + ": expected [a, b]");
    return {s[0], s[1]};
  };
  auto only = [&](std::set<std::string> keys) {
    keys.insert("family");
    for (const char* k : {"alpha", "s", "omega_c", "omega_max", "centers", "eta", "height", "support",
                          "grid_file"}) {
      if (!keys.contains(k) && d.has(k)) {
        throw ConfigError(d.where(k) + ": not used by family '" + family + "'");
      }
    }
  };
  if (family == "caldeira_leggett") {
    only({"alpha", "s", "omega_c", "omega_max"});
    return SpectralDensity::caldeira_leggett(d.number("alpha"), d.number("s"), d.number("omega_c"),
                                             d.number("omega_max"));
  }
  if (family == "gaussian_mix") {
    only({"centers", "eta", "support"});
    const auto [a, b] = support();
    return SpectralDensity::gaussian_mix(d.numbers("centers"), d.number("eta", 0.5), a, b);
  }
  if (family == "flat") {
    only({"height", "support"});
    const auto [a, b] = support();
    return SpectralDensity::flat(d.number("height", 1.0), a, b);
  }
  if (family == "tabulated") {
    only({"grid_file"});
    std::filesystem::path p = d.text("grid_file");
    if (p.is_relative()) p = base_dir / p;
    return read_tabulated(p.string());
  }
  throw ConfigError(d.where("family") + ": unknown family '" + family + "'");
}

void rehash(RunConfig& c, const json& doc) {
  c.canonical = doc.dump();
  c.hash = fnv1a_hex(c.canonical);
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Method parse_method(const std::string& name) {
  if (name == "trapezoid") return Method::Trapezoid;
  if (name == "linear") return Method::Linear;
  if (name == "log") return Method::Log;
  if (name == "mean") return Method::Mean;
  if (name == "equal_weight") return Method::EqualWeight;
  if (name == "bsdo") return Method::Bsdo;
  if (name == "legendre") return Method::Legendre;
  throw ConfigError("unknown method '" + name + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Trapezoid: return "trapezoid";
    case Method::Linear: return "linear";
    case Method::Log: return "log";
    case Method::Mean: return "mean";
    case Method::EqualWeight: return "equal_weight";
    case Method::Bsdo: return "bsdo";
    case Method::Legendre: return "legendre";
  }
  return "?";
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const Section root(doc, "",
                     {"density", "method", "n_b", "log_partition", "model", "time", "error",
                      "precision", "output", "mastereq"});
  RunConfig c;
  if (root.has("density")) {
    c.density = parse_density(root.child("density", {"family", "alpha", "s", "omega_c", "omega_max",
                                                     "centers", "eta", "height", "support",
                                                     "grid_file"}),
                              base_dir);
  }
  try {
    c.method = parse_method(root.text("method", "bsdo"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("method: ") + e.what());
  }
  if (root.has("n_b")) {
    const json& n = doc.at("n_b");
    c.n_b.clear();
    if (n.is_number_integer()) {
      c.n_b.push_back(n.get<int>());
    } else if (n.is_array() && !n.empty()) {
      for (const auto& e : n) {
        if (!e.is_number_integer()) throw ConfigError("n_b: expected an integer or a list of integers");
        c.n_b.push_back(e.get<int>());
      }
    } else {
      throw ConfigError("n_b: expected an integer or a non-empty list of integers");
    }
    for (int v : c.n_b) {
      if (v < 0) throw ConfigError("n_b: values must be >= 0");
    }
  }
  if (root.has("log_partition")) {
    const Section s = root.child("log_partition", {"ratio", "accumulation"});
    c.log_ratio = s.number("ratio", c.log_ratio);
    c.log_accumulation = s.number("accumulation", c.log_accumulation);
    if (!(c.log_ratio > 1.0)) throw ConfigError("log_partition.ratio: must be > 1");
  }
  if (root.has("model")) {
    const Section s = root.child("model", {"eps0", "U", "geometry"});
    c.eps0 = s.number("eps0", c.eps0);
    c.interaction = s.number("U", c.interaction);
    const std::string g = s.text("geometry", "star");
    if (g == "star") {
      c.geometry = Geometry::Star;
    } else if (g == "chain") {
      c.geometry = Geometry::Chain;
    } else {
      throw ConfigError("model.geometry: expected 'star' or 'chain'");
    }
  }
  if (root.has("time")) {
    const Section s = root.child("time", {"dt", "t_end"});
    if (s.has("dt")) {
      c.dt = s.number("dt");
      if (!(*c.dt > 0.0)) throw ConfigError("time.dt: must be > 0");
    }
    c.t_end = s.number("t_end", c.t_end);
    if (!(c.t_end >= 0.0)) throw ConfigError("time.t_end: must be >= 0");
  }
  if (root.has("error")) {
    const Section s = root.child("error", {"threshold", "n_ref", "detector", "relative_factor"});
    c.threshold = s.number("threshold", c.threshold);
    c.n_ref = s.integer("n_ref", c.n_ref);
    c.relative_factor = s.number("relative_factor", c.relative_factor);
    const std::string det = s.text("detector", "absolute");
    if (det == "absolute") {
      c.detector = TmaxDetector::Absolute;
    } else if (det == "relative") {
      c.detector = TmaxDetector::Relative;
    } else {
      throw ConfigError("error.detector: expected 'absolute' or 'relative'");
    }
    if (!(c.threshold > 0.0)) throw ConfigError("error.threshold: must be > 0");
    if (c.n_ref < 1000) throw ConfigError("error.n_ref: must be >= 1000");
  }
  const std::string p = root.text("precision", "double");
  if (p == "double") {
    c.precision = Precision::Double;
  } else if (p == "extended") {
    c.precision = Precision::Extended;
  } else {
    throw ConfigError("precision: expected 'double' or 'extended'");
  }
  c.output = root.text("output", c.output);
  if (root.has("mastereq")) {
    const Section s = root.child("mastereq", {"omega_s", "inverse_temperature", "coupling"});
    c.omega_s = s.number("omega_s", c.omega_s);
    if (s.has("inverse_temperature")) {
      const json& b = doc.at("mastereq").at("inverse_temperature");
      if (b.is_string() && b.get<std::string>() == "inf") {
        c.inverse_temperature = kZeroTemperature;
      } else if (b.is_number()) {
        c.inverse_temperature = b.get<double>();
        if (!(c.inverse_temperature > 0.0)) {
          throw ConfigError("mastereq.inverse_temperature: must be > 0 or \"inf\"");
        }
      } else {
        throw ConfigError("mastereq.inverse_temperature: expected a number or \"inf\"");
      }
    }
    const std::string cp = s.text("coupling", "sigma_x");
    if (cp == "sigma_x") {
      c.coupling = CouplingOperator::SigmaX;
    } else if (cp == "sigma_minus") {
      c.coupling = CouplingOperator::SigmaMinus;
    } else {
      throw ConfigError("mastereq.coupling: expected 'sigma_x' or 'sigma_minus'");
    }
  }
  rehash(c, doc);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

void apply_precision_override(RunConfig& config, Precision precision) {
  config.precision = precision;
  json doc = json::parse(config.canonical);
  doc["precision"] = to_string(precision);
  rehash(config, doc);
}

DiscreteBath discretize(const SpectralDensity& J, Method method, int n_b, const RunConfig& options) {
  switch (method) {
    case Method::Trapezoid: return trapezoid_discretize(J, n_b);
    case Method::Linear: {
      DiscreteBath b = interval_discretize(J, linear_partition(J.lower(), J.upper(), n_b));
      b.method_tag = "linear";
      return b;
    }
    case Method::Log: {
      DiscreteBath b = interval_discretize(
          J, log_partition(J.lower(), J.upper(), n_b, options.log_ratio, options.log_accumulation));
      b.method_tag = "log";
      return b;
    }
    case Method::Mean: return mean_method(J, n_b);
    case Method::EqualWeight: return equal_weight_method(J, n_b);
    case Method::Bsdo: return bsdo_discretize(J, n_b, options.precision);
    case Method::Legendre: return legendre_discretize(J, n_b);
  }
  throw ConfigError("unknown method");
}

DiscreteBath discretize(const RunConfig& config, int n_b) {
  if (!config.density) throw ConfigError("missing key 'density'");
  return discretize(*config.density, config.method, n_b, config);
}

}  // namespace bathdisc
