#ifndef MK_LANCASTER_HPP
#define MK_LANCASTER_HPP

#include <array>
#include <vector>

#include "mk/chains.hpp"
#include "mk/polynomials.hpp"

namespace mk {

/// Joint law on χ(d,N)² with its generalized correlations ρ_n (graded order,
/// ρ_0 = 1) and the smallest entry.
template <class T>
struct BivariateTable {
  int d = 0;
  int N = 0;
  ProbabilityVector p;
  std::vector<Composition> states;
  Matrix<T> P;
  std::vector<MultiIndex> indices;
  std::vector<T> rho;
  T min_entry{};
  std::array<int, 2> witness{0, 0};  // 0-based state positions of min_entry
  bool positive = true;
};

namespace detail {

template <class T>
void locate_minimum(BivariateTable<T>& b, double tol) {
  bool first = true;
  for (std::size_t x = 0; x < b.states.size(); ++x)
    for (std::size_t y = 0; y < b.states.size(); ++y)
      if (first || b.P(x, y) < b.min_entry) {
        b.min_entry = b.P(x, y);
        b.witness = {static_cast<int>(x), static_cast<int>(y)};
        first = false;
      }
  b.positive = nonnegative(b.min_entry, tol);
}

}  // namespace detail

/// P(x,y) = m(x)m(y){1 + Σ_{n≠0} ρ_n Q̃_n(x)Q̃_n(y)} with Q̃_n = Q_n/√h_n.
/// rho is indexed like enumerate_multi_indices(d−1, N); rho[0] is ignored.
template <class T>
BivariateTable<T> bivariate_from_correlations(const std::vector<T>& rho, const OrthoBasis<T>& u,
                                              const ProbabilityVector& p, int N,
                                              double tol = 1e-12, const Limits& limits = {}) {
  const auto t = build_table(u, p, N, limits);
  if (rho.size() != t.indices.size())
    fail(ErrorCode::dimension_mismatch, "need one correlation per multi-index (" +
                                            std::to_string(t.indices.size()) + ")");
  BivariateTable<T> b{u.dim(), N, p, t.states, Matrix<T>(t.states.size(), t.states.size()),
                      t.indices, rho};
  b.rho[0] = T(1);
  const auto w = state_weights(t);
  std::vector<T> scale;
  for (std::size_t a = 0; a < t.indices.size(); ++a)
    scale.push_back(b.rho[a] / norm_Q(t.indices[a], u, N));
  for (std::size_t x = 0; x < t.states.size(); ++x)
    for (std::size_t y = x; y < t.states.size(); ++y) {
      T s(0);
      for (std::size_t a = 0; a < t.indices.size(); ++a)
        s += scale[a] * t.values(a, x) * t.values(a, y);
      b.P(x, y) = b.P(y, x) = w[x] * w[y] * s;
    }
  detail::locate_minimum(b, tol);
  return b;
}

template <class T>
struct CorrelationReport {
  std::vector<MultiIndex> indices;
  std::vector<T> rho;         // E[Q̃_n(X)Q̃_n(Y)]
  double max_cross = 0;       // max_{n≠m} |E[Q̃_n(X)Q̃_m(Y)]|
};

/// Generalized correlations of a joint law whose margins are m(·,p).
template <class T>
CorrelationReport<T> extract_correlations(const Matrix<T>& P, const OrthoBasis<T>& u,
                                          const ProbabilityVector& p, int N, double tol = 1e-12,
                                          const Limits& limits = {}) {
  const auto t = build_table(u, p, N, limits);
  const std::size_t S = t.states.size();
  if (P.rows() != S || P.cols() != S)
    fail(ErrorCode::dimension_mismatch, "table must be " + std::to_string(S) + " x " +
                                            std::to_string(S));
  const auto w = state_weights(t);
  for (std::size_t x = 0; x < S; ++x) {
    T row(0), col(0);
    for (std::size_t y = 0; y < S; ++y) {
      row += P(x, y);
      col += P(y, x);
    }
    if (!negligible(T(row - w[x]), tol) || !negligible(T(col - w[x]), tol))
      fail(ErrorCode::margin_mismatch,
           "margin at state " + std::to_string(x + 1) + " differs from the multinomial law");
  }
  // M(a,b) = E[Q_a(X) Q_b(Y)]
  const std::size_t I = t.indices.size();
  Matrix<T> QP(I, S);
  for (std::size_t a = 0; a < I; ++a)
    for (std::size_t y = 0; y < S; ++y) {
      T s(0);
      for (std::size_t x = 0; x < S; ++x) s += t.values(a, x) * P(x, y);
      QP(a, y) = s;
    }
  CorrelationReport<T> r{t.indices, {}};
  std::vector<T> h;
  for (const auto& n : t.indices) h.push_back(norm_Q(n, u, N));
  for (std::size_t a = 0; a < I; ++a)
    for (std::size_t b = 0; b < I; ++b) {
      T s(0);
      for (std::size_t y = 0; y < S; ++y) s += QP(a, y) * t.values(b, y);
      if (a == b) {
        r.rho.push_back(s / h[a]);
      } else {
        const double scaled = magnitude(s) / std::sqrt(magnitude(h[a]) * magnitude(h[b]));
        r.max_cross = std::max(r.max_cross, scaled);
      }
    }
  return r;
}

/// P(x,y) = m(x)K(x,y) for a kernel reversible with respect to m(·,p),
/// with ρ extracted in the basis u.
template <class T>
BivariateTable<T> bivariate_from_kernel(const CompositionKernel<T>& K, const OrthoBasis<T>& u,
                                        const ProbabilityVector& p, double tol = 1e-12) {
  const auto w = composition_weights(K, p);
  const auto chk = check_kernel(K.P, w, tol);
  if (!chk.reversible)
    fail(ErrorCode::reversibility_violation, "kernel fails detailed balance against m(.,p)");
  BivariateTable<T> b{K.d, K.N, p, K.states, Matrix<T>(K.states.size(), K.states.size()), {}, {}};
  for (std::size_t x = 0; x < K.states.size(); ++x)
    for (std::size_t y = 0; y < K.states.size(); ++y) b.P(x, y) = w[x] * K.P(x, y);
  auto corr = extract_correlations(b.P, u, p, K.N, tol);
  b.indices = std::move(corr.indices);
  b.rho = std::move(corr.rho);
  detail::locate_minimum(b, tol);
  return b;
}

/// Scaled polynomials Q⋄_n = Q_n/Q_n(N e_d) with weights h⋄_n = 1/E[Q⋄_n²].
template <class T>
struct DiamondTable {
  PolynomialTable<T> table;
  Matrix<T> scaled;
  std::vector<T> h;
  std::vector<T> m;
};

template <class T>
DiamondTable<T> diamond_table(const OrthoBasis<T>& u, const ProbabilityVector& p, int N,
                              const Limits& limits = {}) {
  DiamondTable<T> dt{build_table(u, p, N, limits), {}, {}, {}};
  const auto& t = dt.table;
  dt.scaled = Matrix<T>(t.indices.size(), t.states.size());
  for (std::size_t a = 0; a < t.indices.size(); ++a) {
    const T corner = q_at_corner(t.indices[a], u, N);
    for (std::size_t x = 0; x < t.states.size(); ++x) dt.scaled(a, x) = t.values(a, x) / corner;
    dt.h.push_back(h_diamond(t.indices[a], u, N));
  }
  dt.m = state_weights(t);
  return dt;
}

/// Σ_n Q⋄_n(x)Q⋄_n(y)Q⋄_n(z) h⋄_n, state positions in the table.
template <class T>
T hypergroup_triple_sum(const DiamondTable<T>& dt, std::size_t x, std::size_t y, std::size_t z) {
  T s(0);
  for (std::size_t a = 0; a < dt.h.size(); ++a)
    s += dt.scaled(a, x) * dt.scaled(a, y) * dt.scaled(a, z) * dt.h[a];
  return s;
}

template <class T>
T hypergroup_triple_sum(const Composition& x, const Composition& y, const Composition& z,
                        const OrthoBasis<T>& u, const ProbabilityVector& p) {
  const int N = x.total();
  if (y.total() != N || z.total() != N)
    fail(ErrorCode::dimension_mismatch, "triple must share the same N");
  const auto dt = diamond_table(u, p, N);
  const auto& c = dt.table.col_of;
  return hypergroup_triple_sum(dt, c.at(x), c.at(y), c.at(z));
}

/// Every composition triple at level N; witness holds 0-based state positions.
template <class T>
PositivityReport<T> triple_sum_survey(const DiamondTable<T>& dt, double tol = 1e-12) {
  PositivityReport<T> r;
  r.holds = true;
  const int S = static_cast<int>(dt.table.states.size());
  bool first = true;
  for (int x = 0; x < S; ++x)
    for (int y = x; y < S; ++y)
      for (int z = y; z < S; ++z) {
        const T v = hypergroup_triple_sum(dt, x, y, z);
        if (first || v < r.min_value) {
          r.min_value = v;
          r.witness = {x, y, z};
          first = false;
        }
      }
  r.holds = nonnegative(r.min_value, tol);
  return r;
}

/// φ_xy(z) = m(z) Σ_n Q⋄_n(x)Q⋄_n(y)Q⋄_n(z) h⋄_n, the law that linearizes
/// Q⋄_n(x)Q⋄_n(y) = Σ_z φ_xy(z) Q⋄_n(z).
template <class T>
std::vector<T> linearization_distribution(const DiamondTable<T>& dt, std::size_t x, std::size_t y) {
  std::vector<T> phi;
  for (std::size_t z = 0; z < dt.table.states.size(); ++z)
    phi.push_back(dt.m[z] * hypergroup_triple_sum(dt, x, y, z));
  return phi;
}

template <class T>
std::vector<T> linearization_distribution(const Composition& x, const Composition& y,
                                          const OrthoBasis<T>& u, const ProbabilityVector& p,
                                          double tol = 1e-12) {
  const auto hg = hypergroup_check_basis(u, u.dim() - 1, tol);
  if (!hg.holds)
    fail(ErrorCode::hypergroup_precondition,
         "the base fails the hypergroup check, so the linearization law can be negative");
  const auto dt = diamond_table(u, p, x.total());
  return linearization_distribution(dt, dt.table.col_of.at(x), dt.table.col_of.at(y));
}

struct LinearizationReport {
  bool probability = true;   // φ ≥ 0 and Σ φ = 1
  double max_identity_deviation = 0;
  bool identity_holds = true;
};

/// Checks φ_xy against the product formula for every n.
template <class T>
LinearizationReport linearization_check(const DiamondTable<T>& dt, std::size_t x, std::size_t y,
                                        const std::vector<T>& phi, double tol = 1e-10) {
  LinearizationReport r;
  T total(0);
  for (const auto& v : phi) {
    if (!nonnegative(v, tol)) r.probability = false;
    total += v;
  }
  if (!negligible(T(total - T(1)), tol)) r.probability = false;
  for (std::size_t a = 0; a < dt.h.size(); ++a) {
    T s(0);
    for (std::size_t z = 0; z < phi.size(); ++z) s += phi[z] * dt.scaled(a, z);
    const T gap = s - dt.scaled(a, x) * dt.scaled(a, y);
    r.max_identity_deviation = std::max(r.max_identity_deviation, magnitude(gap));
    if (!negligible(gap, tol)) r.identity_holds = false;
  }
  return r;
}

}  // namespace mk

#endif
