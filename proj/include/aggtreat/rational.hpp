#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace aggtreat {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact conversion; every finite double is a dyadic rational.
inline Rational rational_of(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational_of: non-finite value");
    return Rational(x);
}

/// Parse a decimal literal ("0.375", "-2", "1e-3" is rejected) into an exact rational.
Rational rational_from_decimal(const std::string& text);

/// Round to the nearest multiple of 1/denominator (ties away from zero) and reduce.
Rational snap_to_rational(double x, std::int64_t denominator = 1000000000);

/// "3/8" or "2" for integral values.
std::string fraction_string(const Rational& r);

}  // namespace aggtreat
