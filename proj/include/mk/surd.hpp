#ifndef MK_SURD_HPP
#define MK_SURD_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mk/rational.hpp"

namespace mk {

/// Exact element of the field Q(√2, √3, √5, ...): a finite sum of
/// rational multiples of √k with k a squarefree positive integer.
///
/// Square roots of distinct squarefree integers are linearly independent over
/// Q, so the canonical form (sorted keys, no zero coefficients) makes
/// equality and zero tests exact. Sign is decided exactly by splitting on a
/// prime q: x = a + b√q with a, b free of √q, and comparing a² with q·b².
///
/// Used wherever √p enters (Irwin-Helmert rows, the orthogonal matrix H)
/// and the checks still have to be exact.
class Surd {
 public:
  using Term = std::pair<std::uint64_t, Rational>;

  Surd() = default;
  Surd(int v) : Surd(Rational(v)) {}  // NOLINT(google-explicit-constructor)
  Surd(const Rational& r);            // NOLINT(google-explicit-constructor)

  /// √r for r ≥ 0.
  static Surd sqrt(const Rational& r);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 1);
  }
  /// Rational part (coefficient of √1).
  Rational rational_part() const;
  int sign() const;
  double to_double() const;
  std::string str() const;

  Surd& operator+=(const Surd& o);
  Surd& operator-=(const Surd& o);
  Surd& operator*=(const Surd& o);
  Surd& operator/=(const Surd& o);
  Surd operator-() const;

  Surd inverse() const;

  friend Surd operator+(Surd a, const Surd& b) { return a += b; }
  friend Surd operator-(Surd a, const Surd& b) { return a -= b; }
  friend Surd operator*(const Surd& a, const Surd& b);
  friend Surd operator/(Surd a, const Surd& b) { return a /= b; }
  friend bool operator==(const Surd& a, const Surd& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator<(const Surd& a, const Surd& b) {
    return (a - b).sign() < 0;
  }
  friend bool operator>(const Surd& a, const Surd& b) { return b < a; }
  friend bool operator<=(const Surd& a, const Surd& b) { return !(b < a); }
  friend bool operator>=(const Surd& a, const Surd& b) { return !(a < b); }

 private:
  explicit Surd(std::vector<Term> terms) : terms_(std::move(terms)) {}
  void add_term(std::uint64_t key, const Rational& c);
  void normalize();

  std::vector<Term> terms_;  // sorted by key, no zero coefficients
};

}  // namespace mk

#endif
