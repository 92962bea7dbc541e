#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace cuspidal {

/// Arbitrary-precision integers and rationals. All arithmetic in this
/// project is exact; there is no floating point anywhere.
using Int = boost::multiprecision::cpp_int;

/// Exact rational scalar, kept in canonical form (gcd(p,q)=1, q>0) by the
/// backend. Serializes as "p/q", or "p" when the denominator is 1.
using Scalar = boost::multiprecision::cpp_rational;

struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Scalar frac(long num, long den) {
  if (den == 0) throw ParameterError("rational with zero denominator");
  return Scalar(Int(num), Int(den));
}

/// Parses "p/q" or "p".
inline Scalar scalar_from_string(const std::string& text) {
  try {
    return Scalar(text);
  } catch (const std::exception&) {
    throw ParameterError("cannot parse rational: '" + text + "'");
  }
}

inline std::string to_string(const Scalar& x) { return x.str(); }

inline bool is_integer(const Scalar& x) { return denominator(x) == 1; }

}  // namespace cuspidal
