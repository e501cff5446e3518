#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace latsec {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

// Parses "a", "a/b" or a plain decimal like "-1.25" into an exact rational.
Rational parse_rational(std::string_view s);

// "a/b" for non-integers, "a" otherwise.
std::string rational_string(const Rational& x);

// Exact b^e for integer base, non-negative exponent.
Rational rational_pow(const Rational& base, unsigned e);

}  // namespace latsec
