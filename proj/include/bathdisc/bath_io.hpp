#pragma once

#include "bathdisc/direct_disc.hpp"
#include "bathdisc/ortho_quad.hpp"
#include "bathdisc/time_series.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bathdisc {

// %.17g, the round-trip format used by every writer.
std::string format_real(double v);

// Lines written verbatim after a leading "# ".
using HeaderLines = std::vector<std::string>;

// "# method=<tag> N_b=<n> support=<a>,<b>", then rows "n x_n weight_n".
void write_bath(std::ostream& os, const DiscreteBath& bath, const HeaderLines& extra = {});
DiscreteBath read_bath(std::istream& is);

// "# v_tot=<v> N_b=<n>", then "0 alpha_0" and rows "n alpha_n beta_n" for n >= 1.
void write_chain(std::ostream& os, const ChainCoefficients& chain, const HeaderLines& extra = {});
ChainCoefficients read_chain(std::istream& is);

// Named column of a CSV table on a shared grid.
struct Column {
  std::string name;
  Eigen::VectorXd values;
};

// Header comment lines, then "t,<names...>" and one row per grid point.
void write_table(std::ostream& os, const TimeGrid& grid, const std::vector<Column>& columns,
                 const HeaderLines& extra = {});

// "t,re,im".
void write_series(std::ostream& os, const TimeSeries& series, const HeaderLines& extra = {});
// "t,value".
void write_series(std::ostream& os, const RealSeries& series, const HeaderLines& extra = {});

// Parsed CSV: '#' lines skipped, first remaining line is the header row.
struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
};
Table read_table(std::istream& is);

}  // namespace bathdisc
