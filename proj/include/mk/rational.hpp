#ifndef MK_RATIONAL_HPP
#define MK_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace mk {

using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;

/// Parses "7", "-3/4" or a plain decimal such as "0.35" (read exactly as
/// 7/20). Throws Error{parse} on anything else.
Rational parse_rational(std::string_view text);

/// Comma separated list of rational literals.
std::vector<Rational> parse_rational_list(std::string_view text);

/// "n" for integers, "n/d" otherwise.
std::string to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace mk

#endif
