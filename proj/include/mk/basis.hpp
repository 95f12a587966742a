#ifndef MK_BASIS_HPP
#define MK_BASIS_HPP

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mk/errors.hpp"
#include "mk/matrix.hpp"
#include "mk/scalar.hpp"

namespace mk {

/// Multinomial cell probabilities p_1..p_d, all strictly positive, summing
/// to one. Always held as exact rationals; backends convert on demand.
class ProbabilityVector {
 public:
  /// Throws invalid_probability unless every p_j > 0 and |Σp − 1| ≤ sum_tol
  /// (sum_tol = 0 means exact).
  explicit ProbabilityVector(std::vector<Rational> p, const Rational& sum_tol = 0);

  static ProbabilityVector uniform(int d);

  int size() const { return static_cast<int>(p_.size()); }
  const Rational& operator[](std::size_t j) const { return p_[j]; }
  const std::vector<Rational>& values() const { return p_; }
  bool descending() const;

  template <class T>
  std::vector<T> as() const {
    std::vector<T> out;
    out.reserve(p_.size());
    for (const auto& v : p_) out.push_back(from_rational<T>(v));
    return out;
  }

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

 private:
  std::vector<Rational> p_;
};

/// Functions u^(0..d-1) on [d] with u^(0) ≡ 1 and Σ_j u^(k)_j u^(l)_j p_j =
/// δ_kl a_k. Row l of `rows` is u^(l); weights holds a_0..a_{d-1}.
template <class T>
class OrthoBasis {
 public:
  OrthoBasis() = default;
  OrthoBasis(Matrix<T> rows, std::vector<T> weights, std::string label = "custom")
      : rows_(std::move(rows)), weights_(std::move(weights)), label_(std::move(label)) {
    if (rows_.rows() != rows_.cols() || weights_.size() != rows_.rows())
      fail(ErrorCode::dimension_mismatch, "basis must be d x d with d weights");
  }

  int dim() const { return static_cast<int>(rows_.rows()); }
  /// u^(l)_j, both 0-based.
  const T& operator()(int l, int j) const { return rows_(l, j); }
  const Matrix<T>& rows() const { return rows_; }
  const std::vector<T>& weights() const { return weights_; }
  const T& weight(int l) const { return weights_[l]; }
  const std::string& label() const { return label_; }

  bool orthonormal(double tol = 1e-10) const {
    for (const auto& a : weights_)
      if (!negligible(T(a - T(1)), tol)) return false;
    return true;
  }

  template <class To>
  OrthoBasis<To> cast() const {
    std::vector<To> w;
    for (const auto& a : weights_) w.push_back(scalar_cast<To>(a));
    return OrthoBasis<To>(rows_.map([](const T& v) { return scalar_cast<To>(v); }),
                          std::move(w), label_);
  }

 private:
  Matrix<T> rows_;
  std::vector<T> weights_;
  std::string label_;
};

/// h_ij = u^(i-1)_j √(p_j / a_{i-1}); orthogonal when the basis satisfies (2.2).
template <class T>
struct OrthogonalMatrixH {
  Matrix<T> h;
  int dim() const { return static_cast<int>(h.rows()); }
};

/// d×d×d array.
template <class T>
class Tensor3 {
 public:
  explicit Tensor3(int d = 0) : d_(d), data_(static_cast<std::size_t>(d) * d * d, T(0)) {}
  int dim() const { return d_; }
  T& operator()(int i, int j, int k) { return data_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
  const T& operator()(int i, int j, int k) const {
    return data_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k];
  }

 private:
  int d_;
  std::vector<T> data_;
};

template <class T>
struct PositivityReport {
  bool holds = true;
  T min_value{};
  std::array<int, 3> witness{0, 0, 0};  // 0-based
};

struct BasisValidation {
  bool dims_ok = true;
  bool row0_constant = true;
  double max_deviation = 0;  // max |Σ u^k u^l p − δ a_k|
  bool passed = true;
};

struct MonotoneExtreme {
  std::vector<Rational> weights;
  bool boundary = false;  // has zero entries: not a valid ProbabilityVector
};

struct CharacterTable {
  Matrix<Rational> chi;              // chi(i, j) = χ_i(C_j)
  std::vector<BigInt> class_sizes;   // |C_j|
  std::string name = "custom";
};

template <class T>
struct CharacterBasis {
  ProbabilityVector p;
  OrthoBasis<Rational> u;   // the characters themselves, orthonormal
  OrthogonalMatrixH<T> H;
};

// ---------------------------------------------------------------------------

/// a_k = Σ_j (u^(k)_j)² p_j.
template <class T>
std::vector<T> basis_weights(const Matrix<T>& rows, const ProbabilityVector& p) {
  const auto pv = p.as<T>();
  std::vector<T> a(rows.rows(), T(0));
  for (std::size_t k = 0; k < rows.rows(); ++k)
    for (std::size_t j = 0; j < rows.cols(); ++j) a[k] += rows(k, j) * rows(k, j) * pv[j];
  return a;
}

/// Irwin-Helmert rows: u^(i)_j = 0 for j < i, −A_{i+1}/(a_i A_i) at j = i and
/// a_i/(A_i A_{i+1}) for j > i, with a_i² = p_i and A_i² = p_i + … + p_d.
/// Orthonormal for any positive p (sorting is not required).
template <class T>
OrthoBasis<T> helmert_basis(const ProbabilityVector& p) {
  const int d = p.size();
  std::vector<Rational> tail(d + 1, Rational(0));  // tail[i] = A²_{i+1} (0-based i)
  for (int i = d - 1; i >= 0; --i) tail[i] = tail[i + 1] + p[i];
  Matrix<T> rows(d, d);
  for (int j = 0; j < d; ++j) rows(0, j) = T(1);
  for (int i = 1; i < d; ++i) {
    // 0-based: the pivot column is i-1, a_i² = p[i-1], A_i² = tail[i-1], A_{i+1}² = tail[i]
    const Rational& pi = p[i - 1];
    const Rational& Ai2 = tail[i - 1];
    const Rational& Anext2 = tail[i];
    rows(i, i - 1) = -sqrt_of<T>(Anext2 / (pi * Ai2));
    const T after = sqrt_of<T>(pi / (Ai2 * Anext2));
    for (int j = i; j < d; ++j) rows(i, j) = after;
  }
  return OrthoBasis<T>(std::move(rows), std::vector<T>(d, T(1)), "helmert");
}

/// Unscaled Irwin-Lancaster rows: u^(j)_k = 0 for k < j, −(1 − |p_j|)/p_j
/// at k = j and 1 for k > j. Weights from Σ u² p.
template <class T>
OrthoBasis<T> xu_basis(const ProbabilityVector& p) {
  const int d = p.size();
  Matrix<T> rows(d, d);
  for (int k = 0; k < d; ++k) rows(0, k) = T(1);
  Rational head = 0;  // |p_j|
  for (int j = 1; j < d; ++j) {
    head += p[j - 1];
    rows(j, j - 1) = from_rational<T>(Rational(-(Rational(1) - head) / p[j - 1]));
    for (int k = j; k < d; ++k) rows(j, k) = T(1);
  }
  auto w = basis_weights(rows, p);
  return OrthoBasis<T>(std::move(rows), std::move(w), "xu");
}

/// Builds an exact rational basis from explicit rows; weights from (2.2).
OrthoBasis<Rational> basis_from_rows(const Matrix<Rational>& rows, const ProbabilityVector& p,
                                     std::string label = "custom");

template <class T>
OrthogonalMatrixH<T> orthogonal_matrix(const OrthoBasis<T>& u, const ProbabilityVector& p) {
  static_assert(ScalarTraits<T>::has_sqrt, "H needs square roots: use Surd or double");
  const int d = u.dim();
  if (p.size() != d) fail(ErrorCode::dimension_mismatch, "basis and p differ in size");
  Matrix<T> h(d, d);
  for (int i = 0; i < d; ++i) {
    const T& a = u.weight(i);
    for (int j = 0; j < d; ++j) {
      T scale;
      if (a == T(1)) {
        scale = sqrt_of<T>(p[j]);
      } else if constexpr (is_exact_v<T>) {
        scale = sqrt_of<T>(p[j] / scalar_cast<Rational>(a));
      } else {
        scale = sqrt_of<T>(p[j]) / std::sqrt(a);
      }
      h(i, j) = u(i, j) * scale;
    }
  }
  return {std::move(h)};
}

/// Inverse of orthogonal_matrix for orthonormal bases: u^(i)_j = h_{i+1,j}/√p_j.
template <class T>
OrthoBasis<T> basis_from_orthogonal_matrix(const OrthogonalMatrixH<T>& H,
                                           const ProbabilityVector& p, std::string label) {
  const int d = H.dim();
  Matrix<T> rows(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rows(i, j) = H.h(i, j) / sqrt_of<T>(p[j]);
  return OrthoBasis<T>(std::move(rows), std::vector<T>(d, T(1)), std::move(label));
}

template <class T>
BasisValidation validate_basis(const OrthoBasis<T>& u, const ProbabilityVector& p,
                               double tol = 1e-10) {
  BasisValidation r;
  const int d = u.dim();
  if (p.size() != d) fail(ErrorCode::dimension_mismatch, "basis and p differ in size");
  for (int j = 0; j < d; ++j)
    if (!negligible(T(u(0, j) - T(1)), tol)) r.row0_constant = false;
  const auto pv = p.as<T>();
  bool exact_ok = true;
  for (int k = 0; k < d; ++k)
    for (int l = k; l < d; ++l) {
      T s(0);
      for (int j = 0; j < d; ++j) s += u(k, j) * u(l, j) * pv[j];
      if (k == l) s -= u.weight(k);
      if (!negligible(s, tol)) exact_ok = false;
      r.max_deviation = std::max(r.max_deviation, magnitude(s));
    }
  r.passed = r.row0_constant && exact_ok;
  return r;
}

/// c(i,l,k) = Σ_j u^(i)_j u^(l)_j u^(k)_j p_j.
template <class T>
Tensor3<T> basis_triple_products(const OrthoBasis<T>& u, const ProbabilityVector& p) {
  const int d = u.dim();
  const auto pv = p.as<T>();
  Tensor3<T> c(d);
  for (int i = 0; i < d; ++i)
    for (int l = i; l < d; ++l)
      for (int k = l; k < d; ++k) {
        T s(0);
        for (int j = 0; j < d; ++j) s += u(i, j) * u(l, j) * u(k, j) * pv[j];
        c(i, l, k) = c(i, k, l) = c(l, i, k) = c(l, k, i) = c(k, i, l) = c(k, l, i) = s;
      }
  return c;
}

/// 𝔰(j,k,l) = Σ_i h_ij h_ik h_il / h_id over state indices.
template <class T>
Tensor3<T> state_triple_products(const OrthogonalMatrixH<T>& H) {
  const int d = H.dim();
  std::vector<T> inv_last(d);
  for (int i = 0; i < d; ++i) {
    if (H.h(i, d - 1) == T(0))
      fail(ErrorCode::zero_last_column,
           "h_{" + std::to_string(i + 1) + ",d} = 0: hypergroup sums undefined");
    inv_last[i] = T(1) / H.h(i, d - 1);
  }
  Tensor3<T> s(d);
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k)
      for (int l = k; l < d; ++l) {
        T v(0);
        for (int i = 0; i < d; ++i) v += H.h(i, j) * H.h(i, k) * H.h(i, l) * inv_last[i];
        s(j, k, l) = s(j, l, k) = s(k, j, l) = s(k, l, j) = s(l, j, k) = s(l, k, j) = v;
      }
  return s;
}

namespace detail {
template <class T>
PositivityReport<T> min_over_sorted_triples(const Tensor3<T>& t, double tol) {
  PositivityReport<T> r;
  bool first = true;
  const int d = t.dim();
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b)
      for (int c = b; c < d; ++c)
        if (first || t(a, b, c) < r.min_value) {
          r.min_value = t(a, b, c);
          r.witness = {a, b, c};
          first = false;
        }
  r.holds = d == 0 || nonnegative(r.min_value, tol);
  return r;
}
}  // namespace detail

/// Hypergroup property of an orthogonal H: 𝔰(j,k,l) ≥ −tol for all triples.
/// The witness is the (sorted, 0-based) state triple attaining the minimum.
template <class T>
PositivityReport<T> hypergroup_check(const OrthogonalMatrixH<T>& H, double tol = 1e-10) {
  return detail::min_over_sorted_triples(state_triple_products(H), tol);
}

/// Hypergroup sums written on the basis with a distinguished state i0:
/// Σ_l u^(l)_i u^(l)_j u^(l)_k / u^(l)_{i0} ≥ −tol.
template <class T>
PositivityReport<T> hypergroup_check_basis(const OrthoBasis<T>& u, int i0, double tol = 1e-10) {
  const int d = u.dim();
  if (i0 < 0 || i0 >= d) fail(ErrorCode::index_out_of_range, "distinguished state outside [d]");
  std::vector<T> inv(d);
  for (int l = 0; l < d; ++l) {
    if (u(l, i0) == T(0))
      fail(ErrorCode::zero_last_column,
           "u^(" + std::to_string(l) + ") vanishes at the distinguished state");
    inv[l] = T(1) / u(l, i0);
  }
  Tensor3<T> s(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      for (int k = j; k < d; ++k) {
        T v(0);
        for (int l = 0; l < d; ++l) v += u(l, i) * u(l, j) * u(l, k) * inv[l];
        s(i, j, k) = v;
      }
  return detail::min_over_sorted_triples(s, tol);
}

/// GKS property: Σ_j u^(l) u^(m) u^(r) p_j ≥ −tol for 0 ≤ l ≤ m ≤ r ≤ d−1.
template <class T>
PositivityReport<T> gks_check(const OrthoBasis<T>& u, const ProbabilityVector& p,
                              double tol = 1e-10) {
  return detail::min_over_sorted_triples(basis_triple_products(u, p), tol);
}

/// p_d ≤ p_{d-1}, p_d + p_{d-1} ≤ p_{d-2}, …, p_d + … + p_2 ≤ p_1 (exact).
bool is_strongly_monotone(std::span<const Rational> p);
inline bool is_strongly_monotone(const ProbabilityVector& p) {
  return is_strongly_monotone(std::span<const Rational>(p.values()));
}

/// Extreme points of the strongly monotone simplex, listed in the
/// non-increasing coordinate order in which they satisfy the inequalities:
/// (1,0,…,0), (1/2,1/2,0,…), (1/2,1/4,1/4,0,…), …
std::vector<MonotoneExtreme> strongly_monotone_extremes(int d);

CharacterTable s3_character_table();
/// Characters of C_2^n, columns ordered by decreasing element code so that
/// the identity class comes last; row 0 is the trivial character.
CharacterTable c2n_character_table(int n);

/// Validates column orthogonality Σ_j χ_i χ_k |C_j| = δ_ik |G| exactly and
/// the labelling conventions (trivial character first, identity class last).
void validate_character_table(const CharacterTable& table);

/// p_j = |C_j|/|G| and h_ij = χ_i(C_j) √p_j.
template <class T>
CharacterBasis<T> character_basis(const CharacterTable& table) {
  validate_character_table(table);
  const int d = static_cast<int>(table.chi.rows());
  BigInt order = 0;
  for (const auto& c : table.class_sizes) order += c;
  std::vector<Rational> pv;
  for (const auto& c : table.class_sizes) pv.emplace_back(c, order);
  ProbabilityVector p(std::move(pv));
  OrthoBasis<Rational> u(table.chi, std::vector<Rational>(d, Rational(1)), table.name);
  Matrix<T> h(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) h(i, j) = from_rational<T>(table.chi(i, j)) * sqrt_of<T>(p[j]);
  return {std::move(p), std::move(u), {std::move(h)}};
}

/// The 4×4 ±1 example with uniform p: H = ½[[1,1,1,1],[-1,1,-1,1],[1,1,-1,-1],[-1,1,1,-1]],
/// so u = 2H.
OrthoBasis<Rational> hadamard4_basis();

}  // namespace mk

#endif
