#include "bathdisc/bath_io.hpp"

#include "bathdisc/error.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace bathdisc {

namespace {

void write_extra(std::ostream& os, const HeaderLines& extra) {
  for (const auto& line : extra) os << "# " << line << '\n';
}

// key=value tokens from a '#' header line.
std::map<std::string, std::string> header_fields(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream in(line.substr(1));
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) out[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("malformed number '" + s + "' in " + what);
  }
}

// Data lines (non-empty, not comments) split on whitespace.
std::vector<std::vector<std::string>> data_rows(std::istream& is,
                                                std::vector<std::string>& comments) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      comments.push_back(line);
      continue;
    }
    std::istringstream in(line);
    std::vector<std::string> cells;
    std::string cell;
    while (in >> cell) cells.push_back(cell);
    if (!cells.empty()) rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_bath(std::ostream& os, const DiscreteBath& bath, const HeaderLines& extra) {
  os << "# method=" << bath.method_tag << " N_b=" << bath.size()
     << " support=" << format_real(bath.support_lower) << ',' << format_real(bath.support_upper)
     << '\n';
  write_extra(os, extra);
  for (const auto& note : bath.notes) os << "# note: " << note << '\n';
  for (Eigen::Index i = 0; i < bath.size(); ++i) {
    os << i << ' ' << format_real(bath.energies[i]) << ' ' << format_real(bath.weights[i]) << '\n';
  }
}

DiscreteBath read_bath(std::istream& is) {
  std::vector<std::string> comments;
  const auto rows = data_rows(is, comments);
  DiscreteBath bath;
  bool have_header = false;
  for (const auto& c : comments) {
    const auto f = header_fields(c);
    if (!f.contains("method")) continue;
    have_header = true;
    bath.method_tag = f.at("method");
    if (f.contains("support")) {
      const auto& s = f.at("support");
      const auto comma = s.find(',');
      if (comma == std::string::npos) throw ConfigError("bath file: malformed support field");
      bath.support_lower = parse_real(s.substr(0, comma), "bath support");
      bath.support_upper = parse_real(s.substr(comma + 1), "bath support");
    }
    if (f.contains("N_b") && parse_real(f.at("N_b"), "bath header") != static_cast<double>(rows.size())) {
      throw ConfigError("bath file: N_b does not match the number of rows");
    }
    break;
  }
  if (!have_header) throw ConfigError("bath file: missing '# method=' header");
  bath.energies.resize(static_cast<Eigen::Index>(rows.size()));
  bath.weights.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 3) throw ConfigError("bath file: rows must be 'n x_n weight_n'");
    bath.energies[static_cast<Eigen::Index>(i)] = parse_real(rows[i][1], "bath file");
    bath.weights[static_cast<Eigen::Index>(i)] = parse_real(rows[i][2], "bath file");
  }
  try {
    validate(bath);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("bath file: ") + e.what());
  }
  return bath;
}

void write_chain(std::ostream& os, const ChainCoefficients& chain, const HeaderLines& extra) {
  os << "# v_tot=" << format_real(chain.v_tot) << " N_b=" << chain.length() << '\n';
  write_extra(os, extra);
  for (const auto& note : chain.notes) os << "# note: " << note << '\n';
  for (Eigen::Index i = 0; i < chain.alphas.size(); ++i) {
    os << i << ' ' << format_real(chain.alphas[i]);
    if (i > 0) os << ' ' << format_real(chain.betas[i - 1]);
    os << '\n';
  }
}

ChainCoefficients read_chain(std::istream& is) {
  std::vector<std::string> comments;
  const auto rows = data_rows(is, comments);
  ChainCoefficients chain;
  bool have_header = false;
  for (const auto& c : comments) {
    const auto f = header_fields(c);
    if (!f.contains("v_tot")) continue;
    have_header = true;
    chain.v_tot = parse_real(f.at("v_tot"), "chain header");
    break;
  }
  if (!have_header) throw ConfigError("chain file: missing '# v_tot=' header");
  if (rows.empty()) throw ConfigError("chain file: no coefficients");
  chain.alphas.resize(static_cast<Eigen::Index>(rows.size()));
  chain.betas.resize(static_cast<Eigen::Index>(rows.size()) - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != (i == 0 ? 2u : 3u)) {
      throw ConfigError("chain file: rows must be '0 alpha_0' then 'n alpha_n beta_n'");
    }
    chain.alphas[static_cast<Eigen::Index>(i)] = parse_real(rows[i][1], "chain file");
    if (i > 0) {
      const double b = parse_real(rows[i][2], "chain file");
      if (!(b > 0.0)) throw ConfigError("chain file: beta must be positive");
      chain.betas[static_cast<Eigen::Index>(i) - 1] = b;
    }
  }
  return chain;
}

void write_table(std::ostream& os, const TimeGrid& grid, const std::vector<Column>& columns,
                 const HeaderLines& extra) {
  write_extra(os, extra);
  os << 't';
  for (const auto& c : columns) {
    if (c.values.size() != static_cast<Eigen::Index>(grid.count)) {
      throw Error("write_table: column '" + c.name + "' does not match the grid");
    }
    os << ',' << c.name;
  }
  os << '\n';
  for (std::size_t k = 0; k < grid.count; ++k) {
    os << format_real(grid.t(k));
    for (const auto& c : columns) os << ',' << format_real(c.values[static_cast<Eigen::Index>(k)]);
    os << '\n';
  }
}

void write_series(std::ostream& os, const TimeSeries& series, const HeaderLines& extra) {
  write_table(os, series.grid, {{"re", series.values.real()}, {"im", series.values.imag()}}, extra);
}

void write_series(std::ostream& os, const RealSeries& series, const HeaderLines& extra) {
  write_table(os, series.grid, {{"value", series.values}}, extra);
}

Table read_table(std::istream& is) {
  Table table;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!header) {
      table.names = std::move(cells);
      header = true;
      continue;
    }
    if (cells.size() != table.names.size()) throw ConfigError("CSV row width does not match header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_real(c, "CSV file"));
    table.rows.push_back(std::move(row));
  }
  if (!header) throw ConfigError("CSV file has no header row");
  return table;
}

}  // namespace bathdisc
