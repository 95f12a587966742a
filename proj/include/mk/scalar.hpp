#ifndef MK_SCALAR_HPP
#define MK_SCALAR_HPP

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

#include "mk/errors.hpp"
#include "mk/rational.hpp"
#include "mk/surd.hpp"

namespace mk {

using Complex = std::complex<double>;

/// Uniform access to the numeric backends: Rational and Surd are exact,
/// double and Complex compare through tolerances.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr bool has_sqrt = false;
  static constexpr bool ordered = true;
  static Rational from(const Rational& r) { return r; }
  static double to_double(const Rational& r) { return r.convert_to<double>(); }
  static double magnitude(const Rational& r) { return std::abs(to_double(r)); }
  static int sign(const Rational& r) { return r.sign(); }
  static std::string str(const Rational& r) { return to_string(r); }
};

template <>
struct ScalarTraits<Surd> {
  static constexpr bool exact = true;
  static constexpr bool has_sqrt = true;
  static constexpr bool ordered = true;
  static Surd from(const Rational& r) { return Surd(r); }
  static Surd sqrt(const Rational& r) { return Surd::sqrt(r); }
  static double to_double(const Surd& s) { return s.to_double(); }
  static double magnitude(const Surd& s) { return std::abs(s.to_double()); }
  static int sign(const Surd& s) { return s.sign(); }
  static std::string str(const Surd& s) { return s.str(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr bool has_sqrt = true;
  static constexpr bool ordered = true;
  static double from(const Rational& r) { return r.convert_to<double>(); }
  static double sqrt(const Rational& r) { return std::sqrt(from(r)); }
  static double to_double(double v) { return v; }
  static double magnitude(double v) { return std::abs(v); }
  static int sign(double v) { return (v > 0) - (v < 0); }
  static std::string str(double v);
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr bool has_sqrt = true;
  static constexpr bool ordered = false;
  static Complex from(const Rational& r) { return {r.convert_to<double>(), 0.0}; }
  static Complex sqrt(const Rational& r) { return {std::sqrt(r.convert_to<double>()), 0.0}; }
  static double to_double(const Complex& v) { return v.real(); }
  static double magnitude(const Complex& v) { return std::abs(v); }
  static std::string str(const Complex& v);
};

template <class T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

template <class T>
T from_rational(const Rational& r) {
  return ScalarTraits<T>::from(r);
}

template <class T>
T sqrt_of(const Rational& r) {
  static_assert(ScalarTraits<T>::has_sqrt,
                "this backend cannot represent square roots; use Surd or double");
  return ScalarTraits<T>::sqrt(r);
}

template <class T>
double to_double(const T& v) {
  return ScalarTraits<T>::to_double(v);
}

template <class T>
double magnitude(const T& v) {
  return ScalarTraits<T>::magnitude(v);
}

template <class T>
std::string scalar_str(const T& v) {
  return ScalarTraits<T>::str(v);
}

/// x == 0 exactly for exact backends, |x| ≤ tol otherwise.
template <class T>
bool negligible(const T& v, double tol) {
  if constexpr (is_exact_v<T>)
    return v == T(0);
  else
    return magnitude(v) <= tol;
}

/// x ≥ 0 exactly, or x ≥ −tol for floats.
template <class T>
bool nonnegative(const T& v, double tol) {
  if constexpr (is_exact_v<T>)
    return ScalarTraits<T>::sign(v) >= 0;
  else
    return ScalarTraits<T>::to_double(v) >= -tol;
}

/// Converts between backends along Rational → Surd → double → Complex.
template <class To, class From>
To scalar_cast(const From& v) {
  if constexpr (std::is_same_v<To, From>) {
    return v;
  } else if constexpr (std::is_same_v<From, Rational>) {
    return from_rational<To>(v);
  } else if constexpr (std::is_same_v<To, double>) {
    return ScalarTraits<From>::to_double(v);
  } else if constexpr (std::is_same_v<To, Complex>) {
    if constexpr (std::is_same_v<From, Surd> || std::is_same_v<From, double>)
      return Complex(ScalarTraits<From>::to_double(v), 0.0);
  } else if constexpr (std::is_same_v<To, Rational> && std::is_same_v<From, Surd>) {
    if (!v.is_rational())
      fail(ErrorCode::invalid_argument, "surd " + v.str() + " is not rational");
    return v.rational_part();
  } else {
    static_assert(sizeof(To) == 0, "unsupported scalar conversion");
  }
}

}  // namespace mk

#endif
