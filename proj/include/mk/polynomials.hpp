#ifndef MK_POLYNOMIALS_HPP
#define MK_POLYNOMIALS_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mk/basis.hpp"
#include "mk/combinatorics.hpp"
#include "mk/series.hpp"

namespace mk {

// Multivariate Krawtchouk polynomials Q_n(x,u): the coefficient of
// w_1^{n_1}…w_{d-1}^{n_{d-1}} in ∏_j (1 + Σ_l w_l u^(l)_j)^{x_j}.
// Multi-indices n have d−1 entries, compositions x have d.

namespace detail {

template <class T>
void check_shapes(const MultiIndex& n, const Composition& x, int d) {
  if (n.dim() != d - 1 || x.dim() != d)
    fail(ErrorCode::dimension_mismatch,
         "need |n| entries = d-1 and |x| entries = d for d = " + std::to_string(d));
  if (n.order() > x.total())
    fail(ErrorCode::index_out_of_range, "|n| = " + std::to_string(n.order()) +
                                            " exceeds N = " + std::to_string(x.total()));
}

template <class T>
std::vector<T> basis_column(const OrthoBasis<T>& u, int j) {
  std::vector<T> c(u.dim() - 1);
  for (int l = 1; l < u.dim(); ++l) c[l - 1] = u(l, j);
  return c;
}

}  // namespace detail

/// Generating-function route: sequential multiplication over boxes with the
/// series truncated at n componentwise.
template <class T>
T eval_Q_gf(const MultiIndex& n, const Composition& x, const OrthoBasis<T>& u) {
  detail::check_shapes<T>(n, x, u.dim());
  const auto set = MonomialSet::box(n);
  TruncatedSeries<T> s(set);
  for (int j = 0; j < x.dim(); ++j) {
    const auto c = detail::basis_column(u, j);
    for (int r = 0; r < x[j]; ++r) s.multiply_linear(T(1), c);
  }
  return s[set.size() - 1];
}

/// Hypergeometric route: N!/(∏ m_i! (N−|m|)!) Σ_K ∏(−m_l)_(r_l) ∏(−x_j)_(c_j)
/// / ((−N)_(K) ∏ k_lj!) ∏ u_lj^{k_lj}, u_lj = 1 − v^(l)_j, summed over
/// (d−1)×(d−1) count matrices K with row sums r and column sums c.
/// The formula needs v^(l)_d = 1; other bases are rescaled row by row
/// (Q_m(x,v) = ∏ b_l^{m_l} Q_m(x, v/b), b_l = v^(l)_d).
template <class T>
T eval_Q_hypergeometric(const MultiIndex& m, const Composition& x, const OrthoBasis<T>& v) {
  const int d = v.dim();
  detail::check_shapes<T>(m, x, d);
  const int N = x.total();
  const int D = d - 1;
  if (D == 0) return T(1);

  std::vector<T> b(D);
  Matrix<T> u(D, D);
  for (int l = 0; l < D; ++l) {
    b[l] = v(l + 1, d - 1);
    if (b[l] == T(0))
      fail(ErrorCode::basis_convention,
           "v^(" + std::to_string(l + 1) + ")_d = 0: cannot rescale to the v_d = 1 convention");
    for (int j = 0; j < D; ++j) u(l, j) = T(1) - v(l + 1, j) / b[l];
  }

  std::vector<int> row_left(m.degrees()), col_left(x.counts().begin(), x.counts().end() - 1);
  std::vector<int> k(D * D, 0);
  T sum(0);
  std::function<void(int)> walk = [&](int cell) {
    if (cell == D * D) {
      Rational coef = 1;
      int K = 0;
      for (int l = 0; l < D; ++l) {
        int r = 0;
        for (int j = 0; j < D; ++j) r += k[l * D + j];
        coef *= pochhammer(Rational(-m[l]), r);
        K += r;
      }
      for (int j = 0; j < D; ++j) {
        int c = 0;
        for (int l = 0; l < D; ++l) c += k[l * D + j];
        coef *= pochhammer(Rational(-x[j]), c);
      }
      for (int e : k) coef /= Rational(factorial(e));
      coef /= pochhammer(Rational(-N), K);
      T term = from_rational<T>(coef);
      for (int c = 0; c < D * D; ++c) term *= int_power(u(c / D, c % D), k[c]);
      sum += term;
      return;
    }
    const int l = cell / D, j = cell % D;
    const int cap = std::min(row_left[l], col_left[j]);
    for (int e = 0; e <= cap; ++e) {
      k[cell] = e;
      row_left[l] -= e;
      col_left[j] -= e;
      walk(cell + 1);
      row_left[l] += e;
      col_left[j] += e;
    }
    k[cell] = 0;
  };
  walk(0);

  std::vector<int> ext = m.extended(N);
  T value = from_rational<T>(Rational(multinomial(ext))) * sum;
  for (int l = 0; l < D; ++l) value *= int_power(b[l], m[l]);
  return value;
}

/// Largest N accepted by the subset-expansion evaluator.
inline constexpr int kSymmetrizedMaxN = 10;

/// Subset-expansion route: Σ over disjoint A_1,…,A_{d−1} ⊂ {1..N} with
/// |A_l| = n_l of ∏_l ∏_{k∈A_l} u^(l)_{z_k}. Labels z are 0-based.
template <class T>
T eval_Q_symmetrized(const MultiIndex& n, std::span<const int> z, const OrthoBasis<T>& u) {
  const int d = u.dim();
  const int N = static_cast<int>(z.size());
  if (N > kSymmetrizedMaxN)
    fail(ErrorCode::capacity, "subset expansion is limited to N <= " +
                                  std::to_string(kSymmetrizedMaxN));
  if (n.dim() != d - 1) fail(ErrorCode::dimension_mismatch, "n must have d-1 entries");
  if (n.order() > N) fail(ErrorCode::index_out_of_range, "|n| exceeds N");
  for (int label : z)
    if (label < 0 || label >= d) fail(ErrorCode::index_out_of_range, "label outside [d]");
  std::vector<int> left(n.degrees());
  std::function<T(int, int)> walk = [&](int ball, int still) -> T {
    if (still == 0) return T(1);
    if (N - ball < still) return T(0);
    T total = walk(ball + 1, still);  // ball k in no subset
    for (int l = 0; l < d - 1; ++l) {
      if (left[l] == 0) continue;
      --left[l];
      total += u(l + 1, z[ball]) * walk(ball + 1, still - 1);
      ++left[l];
    }
    return total;
  };
  return walk(0, n.order());
}

/// Conditional-binomial (Xu) polynomials K_n(x;p,N), product of univariate
/// Krawtchouk factors with parameters p_j/(1−|p_{j−1}|) and
/// N − |x_{j−1}| − |n^{j+1}|.
Rational eval_xu_K(const MultiIndex& n, const Composition& x, const ProbabilityVector& p);

/// K_n = xu_constant · Q_n(x, xu_basis): ∏ n_j! (p_j/(1−|p_{j−1}|))^{n_j} / (−N)_(|n|).
Rational xu_constant(const MultiIndex& n, const ProbabilityVector& p, int N);

/// C(N; n⁺) = N!/((N−|n|)! ∏ n_l!).
BigInt multinomial_extended(const MultiIndex& n, int N);

/// E[Q_n²] = C(N; n⁺) ∏ a_l^{n_l}.
template <class T>
T norm_Q(const MultiIndex& n, const OrthoBasis<T>& u, int N) {
  T v = from_rational<T>(Rational(multinomial_extended(n, N)));
  for (int l = 0; l < n.dim(); ++l) v *= int_power(u.weight(l + 1), n[l]);
  return v;
}

template <class T>
struct PolynomialTable {
  OrthoBasis<T> basis;
  ProbabilityVector p;
  int N = 0;
  std::vector<MultiIndex> indices;   // graded order
  std::vector<Composition> states;   // lexicographically descending
  Matrix<T> values;                  // values(row of n, column of x)
  PositionIndex<MultiIndex> row_of;
  PositionIndex<Composition> col_of;

  const T& at(const MultiIndex& n, const Composition& x) const {
    return values(row_of.at(n), col_of.at(x));
  }
};

/// Q_n(x) for every |n| ≤ N and |x| = N, one truncated series per x.
template <class T>
PolynomialTable<T> build_table(const OrthoBasis<T>& u, const ProbabilityVector& p, int N,
                               const Limits& limits = {}) {
  const int d = u.dim();
  if (p.size() != d) fail(ErrorCode::dimension_mismatch, "basis and p differ in size");
  if (N < 0) fail(ErrorCode::invalid_argument, "N must be >= 0");
  const BigInt cells = composition_count(d, N) * composition_count(d, N);
  if (cells > BigInt(limits.max_cells))
    fail(ErrorCode::capacity, "table with " + cells.str() + " cells exceeds the limit " +
                                  std::to_string(limits.max_cells));
  PolynomialTable<T> t{u, p, N, enumerate_multi_indices(d - 1, N, limits),
                       enumerate_compositions(d, N, limits), {}, {}, {}};
  t.row_of = PositionIndex<MultiIndex>(t.indices);
  t.col_of = PositionIndex<Composition>(t.states);
  t.values = Matrix<T>(t.indices.size(), t.states.size());
  const auto set = MonomialSet::graded(d - 1, N, limits);
  std::vector<std::vector<T>> columns(d);
  for (int j = 0; j < d; ++j) columns[j] = detail::basis_column(u, j);
  for (std::size_t c = 0; c < t.states.size(); ++c) {
    TruncatedSeries<T> s(set);
    for (int j = 0; j < d; ++j)
      for (int r = 0; r < t.states[c][j]; ++r) s.multiply_linear(T(1), columns[j]);
    for (std::size_t i = 0; i < set.size(); ++i) t.values(i, c) = s[i];
  }
  return t;
}

template <class T>
std::vector<T> state_weights(const PolynomialTable<T>& t) {
  const auto pv = t.p.template as<T>();
  std::vector<T> m;
  m.reserve(t.states.size());
  for (const auto& x : t.states) m.push_back(multinomial_pmf<T>(x, pv));
  return m;
}

/// G(m,n) = Σ_x m(x,p) Q_m(x) Q_n(x).
template <class T>
Matrix<T> gram_matrix(const PolynomialTable<T>& t) {
  const auto w = state_weights(t);
  const std::size_t R = t.indices.size();
  Matrix<T> g(R, R);
  for (std::size_t a = 0; a < R; ++a)
    for (std::size_t b = a; b < R; ++b) {
      T s(0);
      for (std::size_t c = 0; c < t.states.size(); ++c)
        s += w[c] * t.values(a, c) * t.values(b, c);
      g(a, b) = s;
      g(b, a) = s;
    }
  return g;
}

struct DeviationReport {
  double max_deviation = 0;
  bool passed = true;
};

namespace detail {
template <class T>
void record(DeviationReport& r, const T& diff, double tol) {
  if (!negligible(diff, tol)) r.passed = false;
  r.max_deviation = std::max(r.max_deviation, magnitude(diff));
}
}  // namespace detail

/// Gram matrix against diag(norm_Q).
template <class T>
DeviationReport orthogonality_check(const PolynomialTable<T>& t, double tol = 1e-10) {
  const auto g = gram_matrix(t);
  DeviationReport r;
  for (std::size_t a = 0; a < t.indices.size(); ++a)
    for (std::size_t b = 0; b < t.indices.size(); ++b) {
      T expect = a == b ? norm_Q(t.indices[a], t.basis, t.N) : T(0);
      detail::record(r, T(g(a, b) - expect), tol);
    }
  return r;
}

/// Q_n(N e_d, u) = C(N; n⁺) ∏ b_l^{n_l}, b_l = u^(l)_d.
template <class T>
T q_at_corner(const MultiIndex& n, const OrthoBasis<T>& u, int N) {
  const int d = u.dim();
  T v = from_rational<T>(Rational(multinomial_extended(n, N)));
  for (int l = 1; l < d; ++l) {
    if (u(l, d - 1) == T(0))
      fail(ErrorCode::zero_b, "u^(" + std::to_string(l) +
                                  ")_d = 0: the scaled polynomials are undefined for this basis");
    v *= int_power(u(l, d - 1), n[l - 1]);
  }
  return v;
}

/// Q⋄_n(x) = Q_n(x)/Q_n(N e_d).
template <class T>
T scaled_Q(const MultiIndex& n, const Composition& x, const OrthoBasis<T>& u) {
  return eval_Q_gf(n, x, u) / q_at_corner(n, u, x.total());
}

/// h⋄_n = 1/E[Q⋄_n²] = C(N; n⁺) ∏ b_l^{2n_l} / ∏ a_l^{n_l}; the a_l drop
/// out for orthonormal bases.
template <class T>
T h_diamond(const MultiIndex& n, const OrthoBasis<T>& u, int N) {
  const T corner = q_at_corner(n, u, N);
  return corner * corner / norm_Q(n, u, N);
}

template <class T>
struct DualTable {
  OrthogonalMatrixH<T> H;
  int N = 0;
  std::vector<MultiIndex> indices;   // n, standing for n⁺ = (N − |n|, n)
  std::vector<Composition> states;
  Matrix<T> values;                  // Q̂_{n⁺}(x, H)
  PositionIndex<MultiIndex> row_of;
  PositionIndex<Composition> col_of;
};

/// Q̂_{n⁺}(x,H) = [w^{n⁺}] ∏_j (Σ_i h_ij w_i)^{x_j} / C(N; n⁺).
template <class T>
DualTable<T> dual_table(const OrthogonalMatrixH<T>& H, int N, const Limits& limits = {}) {
  const int d = H.dim();
  const BigInt cells = composition_count(d, N) * composition_count(d, N);
  if (cells > BigInt(limits.max_cells))
    fail(ErrorCode::capacity, "dual table with " + cells.str() + " cells exceeds the limit");
  DualTable<T> t{H, N, enumerate_multi_indices(d - 1, N, limits),
                 enumerate_compositions(d, N, limits), {}, {}, {}};
  t.row_of = PositionIndex<MultiIndex>(t.indices);
  t.col_of = PositionIndex<Composition>(t.states);
  t.values = Matrix<T>(t.indices.size(), t.states.size());
  // dehomogenize at w_1 = 1: the exponent of w_1 is N − |n|
  const auto set = MonomialSet::graded(d - 1, N, limits);
  std::vector<T> inv_multinomial;
  for (const auto& n : t.indices)
    inv_multinomial.push_back(from_rational<T>(Rational(1, multinomial_extended(n, N))));
  for (std::size_t c = 0; c < t.states.size(); ++c) {
    TruncatedSeries<T> s(set);
    for (int j = 0; j < d; ++j) {
      std::vector<T> rest(d - 1);
      for (int i = 1; i < d; ++i) rest[i - 1] = H.h(i, j);
      for (int r = 0; r < t.states[c][j]; ++r) s.multiply_linear(H.h(0, j), rest);
    }
    for (std::size_t i = 0; i < set.size(); ++i) t.values(i, c) = s[i] * inv_multinomial[i];
  }
  return t;
}

inline MultiIndex index_of_composition(const Composition& x) {
  return MultiIndex(std::vector<int>(x.counts().begin() + 1, x.counts().end()));
}
inline Composition composition_of_index(const MultiIndex& n, int N) {
  return Composition(n.extended(N));
}

/// Q̂_{n⁺}(x,H) − Q̂_x(n⁺,Hᵀ) over all pairs.
template <class T>
DeviationReport duality_check(const DualTable<T>& of_h, const DualTable<T>& of_ht,
                              double tol = 1e-10) {
  DeviationReport r;
  for (std::size_t a = 0; a < of_h.indices.size(); ++a)
    for (std::size_t c = 0; c < of_h.states.size(); ++c) {
      const auto row = of_ht.row_of.at(index_of_composition(of_h.states[c]));
      const auto col = of_ht.col_of.at(composition_of_index(of_h.indices[a], of_h.N));
      detail::record(r, T(of_h.values(a, c) - of_ht.values(row, col)), tol);
    }
  return r;
}

/// Both sums: Σ_x Q̂_m Q̂_n C(N;x) = δ/C(N;n⁺) on the table of H, and
/// Σ_{n⁺} Q̂_{n⁺}(x) Q̂_{n⁺}(y) C(N;n⁺) = δ/C(N;x) on the table of Hᵀ.
template <class T>
std::pair<DeviationReport, DeviationReport> dual_orthogonality_check(
    const DualTable<T>& of_h, const DualTable<T>& of_ht, double tol = 1e-10) {
  std::pair<DeviationReport, DeviationReport> r;
  const int N = of_h.N;
  for (std::size_t a = 0; a < of_h.indices.size(); ++a)
    for (std::size_t b = a; b < of_h.indices.size(); ++b) {
      T s(0);
      for (std::size_t c = 0; c < of_h.states.size(); ++c)
        s += of_h.values(a, c) * of_h.values(b, c) *
             from_rational<T>(Rational(multinomial_coefficient(of_h.states[c])));
      if (a == b)
        s -= from_rational<T>(Rational(1, multinomial_extended(of_h.indices[a], N)));
      detail::record(r.first, s, tol);
    }
  for (std::size_t c = 0; c < of_ht.states.size(); ++c)
    for (std::size_t e = c; e < of_ht.states.size(); ++e) {
      T s(0);
      for (std::size_t a = 0; a < of_ht.indices.size(); ++a)
        s += of_ht.values(a, c) * of_ht.values(a, e) *
             from_rational<T>(Rational(multinomial_extended(of_ht.indices[a], N)));
      if (c == e)
        s -= from_rational<T>(Rational(1, multinomial_coefficient(of_ht.states[c])));
      detail::record(r.second, s, tol);
    }
  return r;
}

/// Q̂_{n⁺}(x,H) = C(N;n⁺)⁻¹ Q_n(x,u) ∏ p_j^{x_j/2} for H built from u.
template <class T>
DeviationReport dual_link_check(const DualTable<T>& dual, const PolynomialTable<T>& table,
                                double tol = 1e-10) {
  DeviationReport r;
  for (std::size_t a = 0; a < table.indices.size(); ++a)
    for (std::size_t c = 0; c < table.states.size(); ++c) {
      Rational prod = 1;
      for (int j = 0; j < table.p.size(); ++j)
        for (int e = 0; e < table.states[c][j]; ++e) prod *= table.p[j];
      const T expect = table.values(a, c) * sqrt_of<T>(prod) /
                       from_rational<T>(Rational(multinomial_extended(table.indices[a], table.N)));
      detail::record(r, T(dual.values(a, c) - expect), tol);
    }
  return r;
}

/// T_i(φ) = Σ_j φ_j p_j u^(i)_j.
template <class T>
std::vector<T> transform_forms(std::span<const T> phi, const OrthoBasis<T>& u,
                               const ProbabilityVector& p) {
  const int d = u.dim();
  if (static_cast<int>(phi.size()) != d) fail(ErrorCode::dimension_mismatch, "phi needs d entries");
  const auto pv = p.as<T>();
  std::vector<T> out(d, T(0));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out[i] += phi[j] * pv[j] * u(i, j);
  return out;
}

/// lhs = E[∏ φ_i^{X_i} Q_n(X)] by direct summation; rhs = C(N;n⁺) T_0^{N−|n|} ∏ T_i^{n_i}.
template <class T>
std::pair<T, T> transform_check(std::span<const T> phi, const MultiIndex& n,
                                const OrthoBasis<T>& u, const ProbabilityVector& p, int N) {
  const auto pv = p.as<T>();
  T lhs(0);
  for (const auto& x : enumerate_compositions(u.dim(), N)) {
    T f = multinomial_pmf<T>(x, pv) * eval_Q_gf(n, x, u);
    for (int j = 0; j < x.dim(); ++j) f *= int_power(phi[j], x[j]);
    lhs += f;
  }
  const auto tf = transform_forms(phi, u, p);
  T rhs = from_rational<T>(Rational(multinomial_extended(n, N))) * int_power(tf[0], N - n.order());
  for (int i = 0; i < n.dim(); ++i) rhs *= int_power(tf[i + 1], n[i]);
  return {lhs, rhs};
}

template <class T>
struct RecurrenceTerm {
  MultiIndex m;
  T coefficient;
};

/// Expansion of S_i Q*_n in {Q*_m}, Q*_n = ∏ n_l! Q_n, three ways:
/// projection onto the table (ground truth), the printed coefficient set
/// {1 at n+e_i, N−|n|+1 at n−e_i, c(i,l,k) at n−e_l+e_k}, and the set with
/// the multiplicities that a generating-function derivation produces:
/// n_i(N−|n|+1) at n−e_i and n_l c(i,l,k) at n−e_l+e_k.
template <class T>
struct RecurrenceReport {
  std::vector<RecurrenceTerm<T>> projection, printed, corrected;
  bool printed_matches = false;
  bool corrected_matches = false;
};

template <class T>
RecurrenceReport<T> recurrence_check(int i, const MultiIndex& n, const PolynomialTable<T>& t,
                                     double tol = 1e-10) {
  const int d = t.basis.dim();
  if (i < 1 || i >= d) fail(ErrorCode::index_out_of_range, "recurrence index i must be in 1..d-1");
  const std::size_t R = t.indices.size(), C = t.states.size();
  const auto w = state_weights(t);
  auto star = [&](const MultiIndex& m) {
    BigInt f = 1;
    for (int v : m.degrees()) f *= factorial(v);
    return from_rational<T>(Rational(f));
  };
  const std::size_t row_n = t.row_of.at(n);
  const T star_n = star(n);

  std::vector<T> proj(R, T(0));
  for (std::size_t a = 0; a < R; ++a) {
    T s(0);
    for (std::size_t c = 0; c < C; ++c) {
      T S(0);
      for (int j = 0; j < d; ++j)
        S += t.basis(i, j) * from_rational<T>(Rational(t.states[c][j]));
      s += w[c] * S * t.values(row_n, c) * t.values(a, c);
    }
    // coefficient of Q*_m: E[S Q*_n Q*_m] / E[Q*_m²] = star_n E[S Q_n Q_m] / (star_m norm_m)
    proj[a] = star_n * s / (star(t.indices[a]) * norm_Q(t.indices[a], t.basis, t.N));
  }

  const auto c3 = basis_triple_products(t.basis, t.p);
  auto shifted = [&](int minus, int plus) -> long {
    std::vector<int> m(n.degrees());
    if (minus >= 0) --m[minus];
    if (plus >= 0) ++m[plus];
    int total = 0;
    for (int v : m) {
      if (v < 0) return -1;
      total += v;
    }
    if (total > t.N) return -1;  // Q_m vanishes on χ(d,N) for |m| > N
    return static_cast<long>(t.row_of.at(MultiIndex(m)));
  };
  std::vector<T> printed(R, T(0)), corrected(R, T(0));
  const int top = t.N - n.order() + 1;
  if (long r = shifted(-1, i - 1); r >= 0) {
    printed[r] += T(1);
    corrected[r] += T(1);
  }
  if (long r = shifted(i - 1, -1); r >= 0) {
    printed[r] += from_rational<T>(Rational(top));
    corrected[r] += from_rational<T>(Rational(top * n[i - 1]));
  }
  for (int l = 1; l < d; ++l)
    for (int k = 1; k < d; ++k)
      if (long r = shifted(l - 1, k - 1); r >= 0) {
        printed[r] += c3(i, l, k);
        corrected[r] += from_rational<T>(Rational(n[l - 1])) * c3(i, l, k);
      }

  RecurrenceReport<T> rep;
  rep.printed_matches = rep.corrected_matches = true;
  for (std::size_t a = 0; a < R; ++a) {
    if (!negligible(T(proj[a] - printed[a]), tol)) rep.printed_matches = false;
    if (!negligible(T(proj[a] - corrected[a]), tol)) rep.corrected_matches = false;
    if (!negligible(proj[a], tol)) rep.projection.push_back({t.indices[a], proj[a]});
    if (!negligible(printed[a], tol)) rep.printed.push_back({t.indices[a], printed[a]});
    if (!negligible(corrected[a], tol)) rep.corrected.push_back({t.indices[a], corrected[a]});
  }
  return rep;
}

/// K_deg(x,y) = Σ_{|n|=deg} Q_n(x) Q_n(y) / E[Q_n²] on all state pairs.
template <class T>
Matrix<T> reproducing_kernel(const PolynomialTable<T>& t, int deg) {
  const std::size_t C = t.states.size();
  Matrix<T> k(C, C);
  for (std::size_t a = 0; a < t.indices.size(); ++a) {
    if (t.indices[a].order() != deg) continue;
    const T inv = T(1) / norm_Q(t.indices[a], t.basis, t.N);
    for (std::size_t x = 0; x < C; ++x) {
      const T qx = t.values(a, x) * inv;
      for (std::size_t y = 0; y < C; ++y) k(x, y) += qx * t.values(a, y);
    }
  }
  return k;
}

/// Σ_deg K_deg(x,y) − δ_xy / m(x,p).
template <class T>
DeviationReport completeness_check(const PolynomialTable<T>& t, double tol = 1e-10) {
  const auto w = state_weights(t);
  Matrix<T> total(t.states.size(), t.states.size());
  for (int deg = 0; deg <= t.N; ++deg) {
    const auto k = reproducing_kernel(t, deg);
    for (std::size_t x = 0; x < t.states.size(); ++x)
      for (std::size_t y = 0; y < t.states.size(); ++y) total(x, y) += k(x, y);
  }
  DeviationReport r;
  for (std::size_t x = 0; x < t.states.size(); ++x)
    for (std::size_t y = 0; y < t.states.size(); ++y)
      detail::record(r, T(total(x, y) - (x == y ? T(T(1) / w[x]) : T(0))), tol);
  return r;
}

/// E[L_n(Y) K_|n|(x,Y)] − Q_n(x) with L_n = ∏ S_l^{n_l}/n_l!: the leading
/// term alone determines the polynomial.
template <class T>
DeviationReport leading_term_check(const PolynomialTable<T>& t, const MultiIndex& n,
                                   double tol = 1e-10) {
  const int d = t.basis.dim();
  const auto w = state_weights(t);
  const auto k = reproducing_kernel(t, n.order());
  BigInt f = 1;
  for (int v : n.degrees()) f *= factorial(v);
  const T inv_f = from_rational<T>(Rational(1, f));
  std::vector<T> lead(t.states.size());
  for (std::size_t y = 0; y < t.states.size(); ++y) {
    T v = inv_f;
    for (int l = 1; l < d; ++l) {
      T S(0);
      for (int j = 0; j < d; ++j) S += t.basis(l, j) * from_rational<T>(Rational(t.states[y][j]));
      v *= int_power(S, n[l - 1]);
    }
    lead[y] = v;
  }
  const auto row = t.row_of.at(n);
  DeviationReport r;
  for (std::size_t x = 0; x < t.states.size(); ++x) {
    T s(0);
    for (std::size_t y = 0; y < t.states.size(); ++y) s += w[y] * lead[y] * k(x, y);
    detail::record(r, T(s - t.values(row, x)), tol);
  }
  return r;
}

/// Newton-form coefficients: Q_n(x) = Σ_{|k|=|n|} c_k ∏_j C(x_j, k_j) with
/// c_k = [w^n] ∏_j (Σ_l u^(l)_j w_l)^{k_j}. No N appears.
template <class T>
std::vector<std::pair<Composition, T>> newton_coefficients(const MultiIndex& n,
                                                           const OrthoBasis<T>& u) {
  const int d = u.dim();
  const auto set = MonomialSet::box(n);
  std::vector<std::pair<Composition, T>> out;
  for (const auto& k : enumerate_compositions(d, n.order())) {
    TruncatedSeries<T> s(set);
    for (int j = 0; j < d; ++j) {
      const auto c = detail::basis_column(u, j);
      for (int r = 0; r < k[j]; ++r) s.multiply_linear(T(0), c);
    }
    const T& v = s[set.size() - 1];
    if (!(v == T(0))) out.emplace_back(k, v);
  }
  return out;
}

template <class T>
T newton_eval(const std::vector<std::pair<Composition, T>>& coeffs, const Composition& x) {
  T v(0);
  for (const auto& [k, c] : coeffs) {
    BigInt b = 1;
    for (int j = 0; j < x.dim(); ++j) b *= binomial(x[j], k[j]);
    if (b != 0) v += c * from_rational<T>(Rational(b));
  }
  return v;
}

/// The tables at N and N+1 are restrictions of one N-free polynomial per n.
template <class T>
DeviationReport stability_check(const OrthoBasis<T>& u, const ProbabilityVector& p, int N,
                                double tol = 1e-10) {
  DeviationReport r;
  const auto lo = build_table(u, p, N);
  const auto hi = build_table(u, p, N + 1);
  for (const auto& n : lo.indices) {
    const auto coeffs = newton_coefficients(n, u);
    for (const auto* t : {&lo, &hi}) {
      const auto row = t->row_of.at(n);
      for (std::size_t c = 0; c < t->states.size(); ++c)
        detail::record(r, T(t->values(row, c) - newton_eval(coeffs, t->states[c])), tol);
    }
  }
  return r;
}

/// Total degree of x ↦ Q_n(x) on ℕ^d read off forward differences at the
/// origin: the largest |k| ≤ |n|+1 with Δ^k Q_n(0) ≠ 0.
template <class T>
int degree_by_differences(const MultiIndex& n, const OrthoBasis<T>& u, double tol = 1e-10) {
  const int d = u.dim();
  int degree = -1;
  for (int order = 0; order <= n.order() + 1; ++order)
    for (const auto& k : enumerate_compositions(d, order)) {
      // Δ^k F(0) = Σ_{j ≤ k} (−1)^{|k−j|} ∏ C(k_i, j_i) F(j)
      T diff(0);
      std::vector<int> j(d, 0);
      while (true) {
        const Composition pt(j);
        if (pt.total() >= n.order()) {
          BigInt coef = 1;
          for (int i = 0; i < d; ++i) coef *= binomial(k[i], j[i]);
          if ((order - pt.total()) % 2) coef = -coef;
          diff += from_rational<T>(Rational(coef)) * eval_Q_gf(n, pt, u);
        }
        int pos = d - 1;
        while (pos >= 0 && j[pos] == k[pos]) j[pos--] = 0;
        if (pos < 0) break;
        ++j[pos];
      }
      if (!negligible(diff, tol)) degree = std::max(degree, order);
    }
  return degree;
}

}  // namespace mk

#endif
