#include "mk/surd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mk/errors.hpp"

namespace mk {

namespace {

using u64 = std::uint64_t;

u64 checked_mul(u64 a, u64 b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  if (p > static_cast<unsigned __int128>(UINT64_MAX))
    fail(ErrorCode::capacity, "surd radicand exceeds 64 bits");
  return static_cast<u64>(p);
}

u64 to_u64(const BigInt& v) {
  if (v < 0 || v > BigInt(UINT64_MAX))
    fail(ErrorCode::capacity, "surd radicand exceeds 64 bits");
  return v.convert_to<u64>();
}

// n = square² · free with free squarefree.
void squarefree_split(u64 n, u64& square, u64& free) {
  square = 1;
  free = 1;
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    for (unsigned i = 0; i < e / 2; ++i) square *= p;
    if (e % 2) free *= p;
  }
  free *= n;
}

u64 smallest_prime_factor(u64 n) {
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2))
    if (n % p == 0) return p;
  return n;
}

}  // namespace

Surd::Surd(const Rational& r) {
  if (r != 0) terms_.emplace_back(1, r);
}

Surd Surd::sqrt(const Rational& r) {
  if (r < 0) fail(ErrorCode::invalid_argument, "square root of a negative rational");
  if (r == 0) return Surd();
  // √(a/b) = √(ab)/b
  u64 ab = checked_mul(to_u64(numerator(r)), to_u64(denominator(r)));
  u64 square = 1, free = 1;
  squarefree_split(ab, square, free);
  Rational coef(BigInt(square), denominator(r));
  return Surd(std::vector<Term>{{free, coef}});
}

Rational Surd::rational_part() const {
  if (!terms_.empty() && terms_.front().first == 1) return terms_.front().second;
  return Rational(0);
}

void Surd::add_term(u64 key, const Rational& c) {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                             [](const Term& t, u64 k) { return t.first < k; });
  if (it != terms_.end() && it->first == key) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  } else if (c != 0) {
    terms_.insert(it, Term{key, c});
  }
}

void Surd::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(std::move(t));
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) { return t.second == 0; }),
               merged.end());
  terms_ = std::move(merged);
}

Surd& Surd::operator+=(const Surd& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

Surd& Surd::operator-=(const Surd& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, Rational(-c));
  return *this;
}

Surd Surd::operator-() const {
  Surd r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Surd operator*(const Surd& a, const Surd& b) {
  if (a.terms_.empty() || b.terms_.empty()) return Surd();
  if (a.is_rational() || b.is_rational()) {
    const Surd& s = a.is_rational() ? b : a;
    const Rational& f = a.is_rational() ? a.terms_[0].second : b.terms_[0].second;
    Surd r = s;
    for (auto& t : r.terms_) t.second *= f;
    return r;
  }
  std::vector<Surd::Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      // √ka·√kb = g·√((ka/g)(kb/g)), g = gcd, both squarefree
      u64 g = std::gcd(ka, kb);
      u64 key = checked_mul(ka / g, kb / g);
      out.emplace_back(key, ca * cb * Rational(BigInt(g)));
    }
  }
  Surd r(std::move(out));
  r.normalize();
  return r;
}

Surd& Surd::operator*=(const Surd& o) {
  *this = *this * o;
  return *this;
}

Surd Surd::inverse() const {
  if (terms_.empty()) fail(ErrorCode::invalid_argument, "division by zero surd");
  if (terms_.size() == 1) {
    const auto& [k, c] = terms_[0];
    // 1/(c√k) = √k/(ck)
    return Surd(std::vector<Term>{{k, Rational(1) / (c * Rational(BigInt(k)))}});
  }
  u64 pivot = 1;
  for (const auto& t : terms_)
    if (t.first != 1) {
      pivot = smallest_prime_factor(t.first);
      break;
    }
  Surd conj = *this;
  for (auto& t : conj.terms_)
    if (t.first % pivot == 0) t.second = -t.second;
  Surd norm = *this * conj;  // free of √pivot
  return conj * norm.inverse();
}

Surd& Surd::operator/=(const Surd& o) {
  *this = *this * o.inverse();
  return *this;
}

int Surd::sign() const {
  if (terms_.empty()) return 0;
  if (terms_.size() == 1) return terms_[0].second.sign();
  u64 q = 1;
  for (const auto& t : terms_)
    if (t.first != 1) {
      q = smallest_prime_factor(t.first);
      break;
    }
  // x = a + b√q
  Surd a, b;
  for (const auto& [k, c] : terms_) {
    if (k % q == 0)
      b.terms_.emplace_back(k / q, c);
    else
      a.terms_.emplace_back(k, c);
  }
  b.normalize();
  int sa = a.sign();
  int sb = b.sign();
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  Surd diff = a * a - Surd(Rational(BigInt(q))) * b * b;
  int sd = diff.sign();
  return sd > 0 ? sa : (sd < 0 ? sb : 0);
}

double Surd::to_double() const {
  long double acc = 0;
  for (const auto& [k, c] : terms_)
    acc += static_cast<long double>(c.convert_to<double>()) *
           std::sqrt(static_cast<long double>(k));
  return static_cast<double>(acc);
}

std::string Surd::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& [k, c] = terms_[i];
    std::string coef = to_string(c);
    if (i > 0) {
      if (c.sign() < 0) {
        out += " - ";
        coef = to_string(Rational(-c));
      } else {
        out += " + ";
      }
    }
    if (k == 1)
      out += coef;
    else
      out += coef + "*sqrt(" + std::to_string(k) + ")";
  }
  return out;
}

}  // namespace mk
