#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace bathdisc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input: bad parameters, malformed files, schema violations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what,
                          double achieved = std::numeric_limits<double>::quiet_NaN())
      : Error(what), achieved_(achieved) {}

  // Achieved accuracy at the point of failure (NaN when not meaningful).
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace bathdisc
