#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace rodtbc {

// 50 significant decimal digits for every series coefficient and for the
// dense rational-approximation systems.
using Real = boost::multiprecision::cpp_bin_float_50;
using Complex = boost::multiprecision::cpp_complex_50;

inline double to_double(const Real& x) { return x.convert_to<double>(); }

}  // namespace rodtbc
