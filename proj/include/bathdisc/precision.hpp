#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <string>

namespace bathdisc {

enum class Precision { Double, Extended };

// 256-bit significand binary float.
using ExtendedReal = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

// Recurrence orders above this are always computed in extended precision.
inline constexpr int kExtendedPrecisionThreshold = 40;

inline Precision effective_precision(int order, Precision requested,
                                     int threshold = kExtendedPrecisionThreshold) {
  return order > threshold ? Precision::Extended : requested;
}

inline std::string to_string(Precision p) {
  return p == Precision::Double ? "double" : "extended";
}

template <typename Real>
double to_double(const Real& x) {
  return static_cast<double>(x);
}

}  // namespace bathdisc
