#include <gtest/gtest.h>

#include <functional>

#include "mk/polynomials.hpp"
#include "support.hpp"

using mk::Composition;
using mk::Matrix;
using mk::MultiIndex;
using mk::OrthoBasis;
using mk::ProbabilityVector;
using mk::Rational;
using mk::Surd;
using mk::testing::pv;
using mk::testing::random_p;

namespace {

// Independent route: multinomial theorem on each factor
// (1 + Σ_l w_l u_j^l)^{x_j}, summing over count matrices M_{jl} with
// column sums n_l.
template <class T>
T oracle_Q(const MultiIndex& n, const Composition& x, const OrthoBasis<T>& u) {
  const int d = u.dim(), D = d - 1;
  std::vector<int> M(d * D, 0), need(n.degrees()), room(x.counts());
  T total(0);
  std::function<void(int)> walk = [&](int cell) {
    if (cell == d * D) {
      for (int v : need)
        if (v != 0) return;
      T term(1);
      for (int j = 0; j < d; ++j) {
        int used = 0;
        mk::BigInt denom = 1;
        for (int l = 0; l < D; ++l) {
          used += M[j * D + l];
          denom *= mk::factorial(M[j * D + l]);
          for (int e = 0; e < M[j * D + l]; ++e) term *= u(l + 1, j);
        }
        denom *= mk::factorial(x[j] - used);
        term *= T(Rational(mk::factorial(x[j]), denom));
      }
      total += term;
      return;
    }
    const int j = cell / D, l = cell % D;
    for (int e = 0; e <= std::min(need[l], room[j]); ++e) {
      M[cell] = e;
      need[l] -= e;
      room[j] -= e;
      walk(cell + 1);
      need[l] += e;
      room[j] += e;
    }
    M[cell] = 0;
  };
  walk(0);
  return total;
}

OrthoBasis<Surd> uniform2() { return mk::helmert_basis<Surd>(ProbabilityVector::uniform(2)); }

}  // namespace

TEST(Table, UniformBinaryCase) {
  const auto t = mk::build_table(uniform2(), ProbabilityVector::uniform(2), 2);
  const int expect[3][3] = {{1, 1, 1}, {-2, 0, 2}, {1, -1, 1}};
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) EXPECT_EQ(t.values(a, c), Surd(expect[a][c]));
  EXPECT_EQ(t.states[0].counts(), (std::vector<int>{2, 0}));
}

TEST(Table, OneBoxHasASingleRow) {
  const auto p = ProbabilityVector::uniform(1);
  const auto t = mk::build_table(mk::helmert_basis<Surd>(p), p, 3);
  ASSERT_EQ(t.values.rows(), 1u);
  ASSERT_EQ(t.values.cols(), 1u);
  EXPECT_EQ(t.values(0, 0), Surd(1));
}

TEST(Table, CapacityIsEnforced) {
  const auto p = ProbabilityVector::uniform(3);
  try {
    mk::build_table(mk::xu_basis<Rational>(p), p, 6, mk::Limits{100});
    FAIL();
  } catch (const mk::Error& e) {
    EXPECT_EQ(e.code(), mk::ErrorCode::capacity);
  }
}

TEST(Evaluators, AllRoutesAgreeWithTheExpansionOracle) {
  std::mt19937_64 rng(17);
  for (int d = 2; d <= 3; ++d)
    for (int trial = 0; trial < 3; ++trial) {
      const auto p = random_p(rng, d);
      const auto helm = mk::helmert_basis<Surd>(p);
      const auto xu = mk::xu_basis<Rational>(p);
      for (int N = 0; N <= 5; ++N) {
        const auto th = mk::build_table(helm, p, N);
        const auto tx = mk::build_table(xu, p, N);
        for (const auto& n : th.indices)
          for (const auto& x : th.states) {
            const auto z = mk::canonical_labels(x);
            const Surd gf = mk::eval_Q_gf(n, x, helm);
            EXPECT_EQ(gf, oracle_Q(n, x, helm));
            EXPECT_EQ(gf, th.at(n, x));
            EXPECT_EQ(gf, mk::eval_Q_hypergeometric(n, x, helm));
            EXPECT_EQ(gf, mk::eval_Q_symmetrized(n, z, helm));
            const Rational r = mk::eval_Q_gf(n, x, xu);
            EXPECT_EQ(r, tx.at(n, x));
            EXPECT_EQ(r, mk::eval_Q_hypergeometric(n, x, xu));
            EXPECT_EQ(r, mk::eval_Q_symmetrized(n, z, xu));
          }
      }
    }
}

TEST(Evaluators, SymmetrizedIgnoresLabelOrder) {
  std::mt19937_64 rng(2);
  const auto p = random_p(rng, 3);
  const auto u = mk::helmert_basis<Surd>(p);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> z(5);
    for (int& v : z) v = static_cast<int>(rng() % 3);
    const auto x = mk::type_of(z, 3);
    for (const auto& n : mk::enumerate_multi_indices(2, 5))
      EXPECT_EQ(mk::eval_Q_symmetrized(n, z, u), mk::eval_Q_gf(n, x, u));
  }
  // n = e_l gives S_l(x)
  const Composition x({2, 1, 2});
  EXPECT_EQ(mk::eval_Q_gf(MultiIndex({0, 1}), x, u),
            Surd(2) * u(2, 0) + u(2, 1) + Surd(2) * u(2, 2));
  std::vector<int> big(11, 0);
  EXPECT_THROW(mk::eval_Q_symmetrized(MultiIndex({1, 0}), big, u), mk::Error);
}

TEST(Evaluators, ErrorsOnBadShapes) {
  const auto u = uniform2();
  try {
    mk::eval_Q_gf(MultiIndex({3}), Composition({1, 1}), u);
    FAIL();
  } catch (const mk::Error& e) {
    EXPECT_EQ(e.code(), mk::ErrorCode::index_out_of_range);
  }
  EXPECT_THROW(mk::eval_Q_gf(MultiIndex({1, 0}), Composition({1, 1}), u), mk::Error);
  // a zero in the last column blocks the rescaling the hypergeometric form needs
  Matrix<Rational> rows(2, 2);
  rows(0, 0) = rows(0, 1) = 1;
  rows(1, 0) = 1;
  rows(1, 1) = 0;
  OrthoBasis<Rational> bad(rows, {1, 1});
  try {
    mk::eval_Q_hypergeometric(MultiIndex({1}), Composition({1, 1}), bad);
    FAIL();
  } catch (const mk::Error& e) {
    EXPECT_EQ(e.code(), mk::ErrorCode::basis_convention);
  }
}

TEST(Norms, GramMatrixIsDiagonalWithClosedFormEntries) {
  std::mt19937_64 rng(23);
  for (int d = 2; d <= 4; ++d) {
    const auto p = random_p(rng, d);
    for (int N = 0; N <= 4; ++N) {
      EXPECT_TRUE(mk::orthogonality_check(mk::build_table(mk::helmert_basis<Surd>(p), p, N)).passed);
      EXPECT_TRUE(mk::orthogonality_check(mk::build_table(mk::xu_basis<Rational>(p), p, N)).passed);
      const auto f = mk::orthogonality_check(mk::build_table(mk::helmert_basis<double>(p), p, N));
      EXPECT_LE(f.max_deviation, 1e-10);
    }
  }
  const auto u3 = mk::helmert_basis<Surd>(ProbabilityVector::uniform(3));
  EXPECT_EQ(mk::norm_Q(MultiIndex({1, 1}), u3, 3), Surd(6));
  EXPECT_EQ(mk::norm_Q(MultiIndex({1}), uniform2(), 2), Surd(2));
  EXPECT_EQ(mk::norm_Q(MultiIndex({0, 0}), u3, 3), Surd(1));
}

TEST(XuPolynomials, BinaryCaseIsTheClassicalKrawtchouk) {
  // d = 2: K_n(x) = (−1)^n p^n ₂F₁(−n, −x_1; −N; 1/p)
  const auto p = pv({Rational(2, 7), Rational(5, 7)});
  for (int N = 0; N <= 5; ++N)
    for (int n = 0; n <= N; ++n)
      for (int x1 = 0; x1 <= N; ++x1) {
        Rational f = 0;
        for (int k = 0; k <= std::min(n, x1); ++k)
          f += mk::pochhammer(Rational(-n), k) * mk::pochhammer(Rational(-x1), k) /
               (mk::pochhammer(Rational(-N), k) * Rational(mk::factorial(k))) *
               mk::int_power(Rational(7, 2), k);
        const Rational expect = (n % 2 ? -1 : 1) * mk::int_power(p[0], n) * f;
        EXPECT_EQ(mk::eval_xu_K(MultiIndex({n}), Composition({x1, N - x1}), p), expect);
      }
}

TEST(XuPolynomials, CornerValueAndProportionalityConstant) {
  std::mt19937_64 rng(29);
  for (int d = 2; d <= 4; ++d) {
    const auto p = random_p(rng, d);
    const auto xu = mk::xu_basis<Rational>(p);
    for (int N = 0; N <= 4; ++N) {
      std::vector<int> corner(d, 0);
      corner[d - 1] = N;
      for (const auto& n : mk::enumerate_multi_indices(d - 1, N)) {
        Rational expect = n.order() % 2 ? -1 : 1;
        Rational head = 0;
        for (int j = 0; j < d - 1; ++j) {
          expect *= mk::int_power(Rational(p[j] / (1 - head)), n[j]);
          head += p[j];
        }
        EXPECT_EQ(mk::eval_xu_K(n, Composition(corner), p), expect);
        for (const auto& x : mk::enumerate_compositions(d, N))
          EXPECT_EQ(mk::eval_xu_K(n, x, p), mk::xu_constant(n, p, N) * mk::eval_Q_gf(n, x, xu));
      }
    }
  }
}

TEST(Scaled, CornerNormalizationAndOrthogonality) {
  const auto u = uniform2();
  EXPECT_EQ(mk::q_at_corner(MultiIndex({1}), u, 2), Surd(2));
  EXPECT_EQ(mk::scaled_Q(MultiIndex({1}), Composition({2, 0}), u), Surd(-1));
  EXPECT_EQ(mk::scaled_Q(MultiIndex({1}), Composition({1, 1}), u), Surd(0));
  EXPECT_EQ(mk::h_diamond(MultiIndex({1}), u, 2), Surd(2));

  std::mt19937_64 rng(31);
  for (int d = 2; d <= 4; ++d) {
    const auto p = random_p(rng, d);
    for (const OrthoBasis<Surd>& b :
         {mk::helmert_basis<Surd>(p), mk::xu_basis<Rational>(p).cast<Surd>()}) {
      const int N = 3;
      const auto t = mk::build_table(b, p, N);
      const auto w = mk::state_weights(t);
      std::vector<int> corner(d, 0);
      corner[d - 1] = N;
      for (const auto& n : t.indices) {
        EXPECT_EQ(mk::scaled_Q(n, Composition(corner), b), Surd(1));
        Surd e2(0);
        for (std::size_t c = 0; c < t.states.size(); ++c) {
          const Surd q = mk::scaled_Q(n, t.states[c], b);
          e2 += w[c] * q * q;
        }
        EXPECT_EQ(e2 * mk::h_diamond(n, b, N), Surd(1));
      }
    }
  }
  Matrix<Rational> rows(2, 2);
  rows(0, 0) = rows(0, 1) = 1;
  rows(1, 0) = 1;
  rows(1, 1) = 0;
  try {
    mk::q_at_corner(MultiIndex({1}), OrthoBasis<Rational>(rows, {1, 1}), 2);
    FAIL();
  } catch (const mk::Error& e) {
    EXPECT_EQ(e.code(), mk::ErrorCode::zero_b);
  }
}

TEST(Dual, DualityOrthogonalityAndLink) {
  std::mt19937_64 rng(37);
  for (int d = 2; d <= 4; ++d) {
    const auto p = d == 2 ? ProbabilityVector::uniform(2) : random_p(rng, d);
    const auto u = mk::helmert_basis<Surd>(p);
    const auto H = mk::orthogonal_matrix(u, p);
    const mk::OrthogonalMatrixH<Surd> Ht{H.h.transpose()};
    for (int N = 0; N <= 4; ++N) {
      const auto dh = mk::dual_table(H, N);
      const auto dt = mk::dual_table(Ht, N);
      EXPECT_TRUE(mk::duality_check(dh, dt).passed) << d << " " << N;
      const auto [first, second] = mk::dual_orthogonality_check(dh, dt);
      EXPECT_TRUE(first.passed);
      EXPECT_TRUE(second.passed);
      EXPECT_TRUE(mk::dual_link_check(dh, mk::build_table(u, p, N)).passed);
      // n⁺ = (N,0,…,0): ∏ p^{x/2}
      for (std::size_t c = 0; c < dh.states.size(); ++c) {
        Rational prod = 1;
        for (int j = 0; j < d; ++j) prod *= mk::int_power(p[j], dh.states[c][j]);
        EXPECT_EQ(dh.values(0, c), Surd::sqrt(prod));
      }
    }
  }
}

TEST(Transforms, ProductFormMatchesDirectSum) {
  const auto u2 = uniform2();
  const auto p2 = ProbabilityVector::uniform(2);
  const std::vector<Surd> phi2 = {Surd(2), Surd(1)};
  const auto [l2, r2] = mk::transform_check<Surd>(phi2, MultiIndex({1}), u2, p2, 2);
  EXPECT_EQ(l2, Surd(Rational(-3, 2)));
  EXPECT_EQ(r2, Surd(Rational(-3, 2)));

  const auto p = pv({Rational(1, 2), Rational(1, 3), Rational(1, 6)});
  const auto u = mk::helmert_basis<Surd>(p);
  const std::vector<Surd> one(3, Surd(1));
  const std::vector<Surd> phi = {Surd(Rational(3, 2)), Surd(Rational(-1, 3)), Surd(2)};
  for (const auto& n : mk::enumerate_multi_indices(2, 3)) {
    const auto [l, r] = mk::transform_check<Surd>(phi, n, u, p, 3);
    EXPECT_EQ(l, r);
    const auto [l1, r1] = mk::transform_check<Surd>(one, n, u, p, 3);
    EXPECT_EQ(l1, r1);
    EXPECT_EQ(l1, Surd(n.order() == 0 ? 1 : 0));
  }
}

TEST(Recurrence, ProjectionAgreesWithCorrectedCoefficients) {
  // S_1 · 1 = Q*_(1)
  const auto t2 = mk::build_table(uniform2(), ProbabilityVector::uniform(2), 3);
  auto r0 = mk::recurrence_check(1, MultiIndex({0}), t2);
  ASSERT_EQ(r0.projection.size(), 1u);
  EXPECT_EQ(r0.projection[0].m, MultiIndex({1}));
  EXPECT_EQ(r0.projection[0].coefficient, Surd(1));
  EXPECT_TRUE(r0.corrected_matches);

  // symmetric binary case: S Q*_n = Q*_{n+1} + n(N−n+1) Q*_{n−1}
  for (int n = 0; n <= 3; ++n) {
    const auto r = mk::recurrence_check(1, MultiIndex({n}), t2);
    EXPECT_TRUE(r.corrected_matches) << n;
    for (const auto& term : r.projection) {
      if (term.m[0] == n - 1) EXPECT_EQ(term.coefficient, Surd(n * (3 - n + 1)));
      if (term.m[0] == n + 1) EXPECT_EQ(term.coefficient, Surd(1));
    }
    EXPECT_EQ(r.printed_matches, n <= 1) << n;
  }

  std::mt19937_64 rng(41);
  for (int d = 2; d <= 4; ++d)
    for (int trial = 0; trial < 2; ++trial) {
      const auto p = d == 3 && trial == 0 ? pv({Rational(1, 2), Rational(1, 3), Rational(1, 6)})
                                          : random_p(rng, d);
      const auto t = mk::build_table(mk::helmert_basis<Surd>(p), p, 3);
      for (const auto& n : t.indices)
        for (int i = 1; i < d; ++i)
          EXPECT_TRUE(mk::recurrence_check(i, n, t).corrected_matches);
    }
}

TEST(Kernel, InvariantUnderRotationOfTheBasis) {
  const auto p = ProbabilityVector::uniform(3);
  const auto u = mk::helmert_basis<Surd>(p);
  const Surd c(Rational(3, 5)), s(Rational(4, 5));
  Matrix<Surd> rows = u.rows();
  for (int j = 0; j < 3; ++j) {
    rows(1, j) = c * u(1, j) + s * u(2, j);
    rows(2, j) = Surd(0) - s * u(1, j) + c * u(2, j);
  }
  const OrthoBasis<Surd> rot(rows, {1, 1, 1}, "rotated");
  ASSERT_TRUE(mk::validate_basis(rot, p).passed);
  const auto ta = mk::build_table(u, p, 2), tb = mk::build_table(rot, p, 2);
  for (int deg = 0; deg <= 2; ++deg) {
    const auto ka = mk::reproducing_kernel(ta, deg);
    EXPECT_EQ(ka, mk::reproducing_kernel(tb, deg));
    EXPECT_EQ(ka, ka.transpose());
  }
  for (std::size_t x = 0; x < ta.states.size(); ++x)
    EXPECT_EQ(mk::reproducing_kernel(ta, 0)(x, 0), Surd(1));

  // the float backend with an irrational angle
  const auto uf = mk::helmert_basis<double>(p);
  Matrix<double> rf = uf.rows();
  const double a = 0.7;
  for (int j = 0; j < 3; ++j) {
    rf(1, j) = std::cos(a) * uf(1, j) + std::sin(a) * uf(2, j);
    rf(2, j) = -std::sin(a) * uf(1, j) + std::cos(a) * uf(2, j);
  }
  const auto fa = mk::build_table(uf, p, 3);
  const auto fb = mk::build_table(OrthoBasis<double>(rf, {1, 1, 1}), p, 3);
  for (int deg = 0; deg <= 3; ++deg) {
    const auto ka = mk::reproducing_kernel(fa, deg), kb = mk::reproducing_kernel(fb, deg);
    for (std::size_t x = 0; x < fa.states.size(); ++x)
      for (std::size_t y = 0; y < fa.states.size(); ++y) EXPECT_NEAR(ka(x, y), kb(x, y), 1e-10);
  }
}

TEST(Kernel, CompletenessAndLeadingTermReconstruction) {
  std::mt19937_64 rng(43);
  for (int N = 0; N <= 4; ++N) {
    const auto p = random_p(rng, 2);
    EXPECT_TRUE(mk::completeness_check(mk::build_table(mk::helmert_basis<Surd>(p), p, N)).passed);
  }
  for (int d = 2; d <= 3; ++d)
    for (int N = 1; N <= 4; ++N) {
      const auto p = random_p(rng, d);
      const auto t = mk::build_table(mk::helmert_basis<Surd>(p), p, N);
      for (const auto& n : t.indices) EXPECT_TRUE(mk::leading_term_check(t, n).passed);
    }
}

TEST(Stability, OnePolynomialAcrossNAndDegreeIsOrder) {
  std::mt19937_64 rng(47);
  for (int d = 2; d <= 3; ++d) {
    const auto p = random_p(rng, d);
    const auto u = mk::helmert_basis<Surd>(p);
    for (int N = 0; N <= 3; ++N) EXPECT_TRUE(mk::stability_check(u, p, N).passed);
    for (const auto& n : mk::enumerate_multi_indices(d - 1, 3))
      EXPECT_EQ(mk::degree_by_differences(n, u), n.order());
  }
}
