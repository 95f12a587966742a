#include "mk/polynomials.hpp"

namespace mk {

BigInt multinomial_extended(const MultiIndex& n, int N) {
  return multinomial(n.extended(N));
}

Rational eval_xu_K(const MultiIndex& n, const Composition& x, const ProbabilityVector& p) {
  const int d = p.size();
  if (n.dim() != d - 1 || x.dim() != d)
    fail(ErrorCode::dimension_mismatch, "need d-1 degrees and d counts");
  const int N = x.total();
  if (n.order() > N) fail(ErrorCode::index_out_of_range, "|n| exceeds N");

  Rational value = pochhammer(Rational(-N), n.order());
  value = (n.order() % 2 ? Rational(-1) : Rational(1)) / value;
  Rational head = 0;
  int prefix_x = 0;
  int tail_n = n.order();
  for (int j = 0; j < d - 1; ++j) {
    tail_n -= n[j];
    const Rational q = p[j] / (1 - head);
    const int M = N - prefix_x - tail_n;
    // (−M)_(n_j) K_{n_j}(x_j; q, M), expanded so that (−M)_(k) never divides
    Rational factor = 0;
    Rational inv_q_pow = 1;
    for (int k = 0; k <= n[j]; ++k) {
      factor += pochhammer(Rational(-n[j]), k) * pochhammer(Rational(-x[j]), k) /
                Rational(factorial(k)) * inv_q_pow * pochhammer(Rational(k - M), n[j] - k);
      inv_q_pow /= q;
    }
    value *= int_power(q, n[j]) * factor;
    head += p[j];
    prefix_x += x[j];
  }
  return value;
}

Rational xu_constant(const MultiIndex& n, const ProbabilityVector& p, int N) {
  Rational c = 1 / pochhammer(Rational(-N), n.order());
  Rational head = 0;
  for (int j = 0; j < n.dim(); ++j) {
    c *= Rational(factorial(n[j])) * int_power(Rational(p[j] / (1 - head)), n[j]);
    head += p[j];
  }
  return c;
}

}  // namespace mk
