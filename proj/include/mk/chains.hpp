#ifndef MK_CHAINS_HPP
#define MK_CHAINS_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "mk/basis.hpp"
#include "mk/combinatorics.hpp"
#include "mk/polynomials.hpp"

namespace mk {

/// A chain on [d] with stationary p and eigen-data: K α^(k) = ρ_k α^(k),
/// left eigenvectors p_i β^(k)_i, Σ_i p_i α^(k)_i β^(l)_i = δ_kl, and
/// α^(0) = β^(0) ≡ 1. Reversible chains have α = β orthonormal.
template <class T>
struct SingleBallChain {
  std::string name;
  Matrix<T> K;
  ProbabilityVector p;
  std::vector<T> rho;
  OrthoBasis<T> alpha;
  OrthoBasis<T> beta;
  int dim() const { return static_cast<int>(K.rows()); }
};

template <class T>
struct KernelCheck {
  bool stochastic = true;   // rows sum to 1, entries ≥ −tol
  bool stationary = true;   // πᵀK = πᵀ
  bool reversible = true;   // π_i K_ij = π_j K_ji
  double max_deviation = 0;
};

/// Row sums, nonnegativity, stationarity and detailed balance of K against π.
template <class T>
KernelCheck<T> check_kernel(const Matrix<T>& K, const std::vector<T>& pi, double tol = 1e-12) {
  KernelCheck<T> r;
  const std::size_t n = K.rows();
  auto note = [&](const T& v, bool& flag) {
    if (!negligible(v, tol)) flag = false;
    r.max_deviation = std::max(r.max_deviation, magnitude(v));
  };
  for (std::size_t i = 0; i < n; ++i) {
    T s(0);
    for (std::size_t j = 0; j < n; ++j) {
      s += K(i, j);
      if constexpr (ScalarTraits<T>::ordered)
        if (!nonnegative(K(i, j), tol)) r.stochastic = false;
    }
    note(T(s - T(1)), r.stochastic);
  }
  for (std::size_t j = 0; j < n; ++j) {
    T s(0);
    for (std::size_t i = 0; i < n; ++i) s += pi[i] * K(i, j);
    note(T(s - pi[j]), r.stationary);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const T gap = pi[i] * K(i, j) - pi[j] * K(j, i);
      if (!negligible(gap, tol)) r.reversible = false;
    }
  return r;
}

// --- single-ball chains ----------------------------------------------------

/// Random-scan Metropolis on [d] for sorted p: propose j uniformly; accept
/// when j ≤ i, else with probability p_j/p_i.
Matrix<Rational> metropolis_kernel(const ProbabilityVector& p);

/// Exact spectrum of metropolis_kernel on the Helmert functions:
/// β_0 = 1 and β_l = (d−l+1)/d − A_l²/(d p_l), A_l² = p_l + … + p_d.
std::vector<Rational> metropolis_eigenvalues(const ProbabilityVector& p);

/// The closed form 1 − A_l²/(d p_l) as printed with the diagonalization
/// statement; kept for comparison reports. Agrees with the exact spectrum
/// only at l = 1.
std::vector<Rational> metropolis_printed_eigenvalues(const ProbabilityVector& p);

template <class T>
SingleBallChain<T> metropolis_chain(const ProbabilityVector& p) {
  if (!p.descending())
    fail(ErrorCode::unsorted_probability, "the Metropolis chain needs p_1 >= ... >= p_d");
  auto u = helmert_basis<T>(p);
  std::vector<T> rho;
  for (const auto& b : metropolis_eigenvalues(p)) rho.push_back(from_rational<T>(b));
  return {"metropolis", metropolis_kernel(p).map([](const Rational& v) { return from_rational<T>(v); }),
          p, std::move(rho), u, u};
}

template <class T>
struct LancasterKernel {
  Matrix<T> K;
  bool member = true;
  T min_entry{};
  std::array<int, 2> witness{0, 0};  // 0-based (i, j) of the smallest entry
};

/// K_β(i,j) = p_j {1 + Σ_l β_l u^(l)_i u^(l)_j} for an orthonormal basis;
/// β is a member of the Lancaster set when every entry is ≥ 0.
template <class T>
LancasterKernel<T> lancaster_kernel(const std::vector<T>& beta, const OrthoBasis<T>& u,
                                    const ProbabilityVector& p, double tol = 1e-12) {
  const int d = u.dim();
  if (static_cast<int>(beta.size()) != d - 1 || p.size() != d)
    fail(ErrorCode::dimension_mismatch, "beta needs d-1 entries");
  const auto pv = p.as<T>();
  LancasterKernel<T> r;
  r.K = Matrix<T>(d, d);
  bool first = true;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      T s(1);
      for (int l = 1; l < d; ++l) s += beta[l - 1] * u(l, i) * u(l, j);
      r.K(i, j) = pv[j] * s;
      if (first || r.K(i, j) < r.min_entry) {
        r.min_entry = r.K(i, j);
        r.witness = {i, j};
        first = false;
      }
    }
  r.member = nonnegative(r.min_entry, tol);
  return r;
}

template <class T>
SingleBallChain<T> lancaster_chain(const std::vector<T>& beta, const OrthoBasis<T>& u,
                                   const ProbabilityVector& p) {
  auto lk = lancaster_kernel(beta, u, p);
  if (!lk.member)
    fail(ErrorCode::invalid_argument, "beta is outside the Lancaster set (negative entry at (" +
                                          std::to_string(lk.witness[0] + 1) + "," +
                                          std::to_string(lk.witness[1] + 1) + "))");
  std::vector<T> rho{T(1)};
  rho.insert(rho.end(), beta.begin(), beta.end());
  return {"lancaster", std::move(lk.K), p, std::move(rho), u, u};
}

template <class T>
struct ExtremeCandidate {
  int state = 0;  // 0-based j
  std::vector<T> beta;
  bool member = false;
  T min_entry{};
};

/// Candidates β_l = u^(l)_j / u^(l)_{i0}, one per state j, each checked for
/// membership. Requires the hypergroup property at i0.
template <class T>
std::vector<ExtremeCandidate<T>> lancaster_extreme_candidates(const OrthoBasis<T>& u,
                                                              const ProbabilityVector& p, int i0,
                                                              double tol = 1e-12) {
  const auto hg = hypergroup_check_basis(u, i0, tol);
  if (!hg.holds)
    fail(ErrorCode::hypergroup_precondition,
         "hypergroup sums at the distinguished state are negative (min at (" +
             std::to_string(hg.witness[0] + 1) + "," + std::to_string(hg.witness[1] + 1) + "," +
             std::to_string(hg.witness[2] + 1) + "))");
  const int d = u.dim();
  std::vector<ExtremeCandidate<T>> out;
  for (int j = 0; j < d; ++j) {
    ExtremeCandidate<T> c;
    c.state = j;
    for (int l = 1; l < d; ++l) c.beta.push_back(u(l, j) / u(l, i0));
    const auto lk = lancaster_kernel(c.beta, u, p, tol);
    c.member = lk.member;
    c.min_entry = lk.min_entry;
    out.push_back(std::move(c));
  }
  return out;
}

/// K(i,j) = α_i δ_ij + (1 − α_i) θ_j; stationary p_i ∝ θ_i/(1 − α_i).
struct HoareRahmannKernel {
  Matrix<Rational> K;
  ProbabilityVector p;
};
HoareRahmannKernel hoare_rahmann_kernel(const std::vector<Rational>& alpha,
                                        const std::vector<Rational>& theta);

/// Eigen-data of a p-reversible kernel from a Jacobi diagonalization of
/// D^{1/2} K D^{−1/2}; α^(0) ≡ 1 first, the rest by decreasing eigenvalue.
SingleBallChain<double> reversible_eigensystem(const Matrix<Rational>& K, const ProbabilityVector& p,
                                               std::string name);

/// P(a,b) = q_{(b−a) mod d} (0-based).
Matrix<Rational> circulant_kernel(const std::vector<Rational>& q);

/// η_k = Σ_r q_r e^{2πirk/d}.
std::vector<Complex> circulant_eigenvalues(const std::vector<Rational>& q);

/// Fourier eigen-data: α^(l)_a = e^{2πila/d}, β^(l)_b = e^{−2πilb/d}, uniform p.
SingleBallChain<Complex> circulant_chain_base(const std::vector<Rational>& q);

/// Two-state deterministic flip (ρ_1 = −1) with basis rows (1,1), (−1,1).
template <class T>
SingleBallChain<T> flip_chain() {
  const auto p = ProbabilityVector::uniform(2);
  Matrix<T> K(2, 2), rows(2, 2, T(1));
  K(0, 1) = K(1, 0) = T(1);
  rows(1, 0) = T(-1);
  OrthoBasis<T> u(rows, {T(1), T(1)}, "flip");
  return {"flip", std::move(K), p, {T(1), T(-1)}, u, u};
}

// --- composition chains ----------------------------------------------------

/// Distribution of the number k of refreshed coordinates, k = 0..N.
struct SubsetLaw {
  std::vector<Rational> size_probs;
  static SubsetLaw point_mass(int N, int k);
  void validate(int N) const;
};

template <class T>
struct CompositionKernel {
  int d = 0;
  int N = 0;
  std::vector<Composition> states;
  PositionIndex<Composition> index;
  Matrix<T> P;
};

namespace detail {

template <class T>
CompositionKernel<T> empty_kernel(int d, int N, const Limits& limits) {
  CompositionKernel<T> k;
  k.d = d;
  k.N = N;
  k.states = enumerate_compositions(d, N, limits);
  const BigInt cells = BigInt(k.states.size()) * BigInt(k.states.size());
  if (cells > BigInt(limits.max_cells))
    fail(ErrorCode::capacity, "composition kernel with " + cells.str() + " entries exceeds the limit");
  k.index = PositionIndex<Composition>(k.states);
  k.P = Matrix<T>(k.states.size(), k.states.size());
  return k;
}

/// Outcome law of moving s_i balls out of each box i independently by K1.
template <class T>
std::map<std::vector<int>, T> independent_moves(const Matrix<T>& K1, const std::vector<int>& s) {
  const int d = static_cast<int>(K1.rows());
  std::map<std::vector<int>, T> law{{std::vector<int>(d, 0), T(1)}};
  for (int i = 0; i < d; ++i)
    for (int b = 0; b < s[i]; ++b) {
      std::map<std::vector<int>, T> next;
      for (const auto& [o, w] : law)
        for (int j = 0; j < d; ++j) {
          if (K1(i, j) == T(0)) continue;
          auto o2 = o;
          ++o2[j];
          auto [it, fresh] = next.try_emplace(std::move(o2), w * K1(i, j));
          if (!fresh) it->second += w * K1(i, j);
        }
      law = std::move(next);
    }
  return law;
}

}  // namespace detail

/// Composition chain: draw k from the law, pick k of the N balls uniformly,
/// move each chosen ball independently by K1.
template <class T>
CompositionKernel<T> lift_kernel(const Matrix<T>& K1, int N, const SubsetLaw& law,
                                 const Limits& limits = {}) {
  law.validate(N);
  const int d = static_cast<int>(K1.rows());
  auto out = detail::empty_kernel<T>(d, N, limits);
  for (std::size_t a = 0; a < out.states.size(); ++a) {
    const auto& x = out.states[a];
    for (int k = 0; k <= N; ++k) {
      if (law.size_probs[k] == 0) continue;
      const Rational pick = law.size_probs[k] / Rational(binomial(N, k));
      for (const auto& s : enumerate_compositions(d, k)) {
        BigInt ways = 1;
        for (int i = 0; i < d; ++i) ways *= binomial(x[i], s[i]);
        if (ways == 0) continue;
        const T w = from_rational<T>(pick * Rational(ways));
        for (const auto& [o, prob] : detail::independent_moves(K1, s.counts())) {
          std::vector<int> y(x.counts());
          for (int i = 0; i < d; ++i) y[i] += o[i] - s[i];
          out.P(a, out.index.at(Composition(y))) += w * prob;
        }
      }
    }
  }
  return out;
}

/// Urn of Lancaster points: N Lancaster points are dealt to the N balls in a
/// uniformly random order and each ball moves by its own K_β.
template <class T>
CompositionKernel<T> urn_kernel(const std::vector<Matrix<T>>& item_kernels, int N,
                                const Limits& limits = {}) {
  if (static_cast<int>(item_kernels.size()) != N)
    fail(ErrorCode::dimension_mismatch, "the urn needs exactly N kernels");
  const int d = N == 0 ? 1 : static_cast<int>(item_kernels[0].rows());
  auto out = detail::empty_kernel<T>(d, N, limits);
  for (std::size_t a = 0; a < out.states.size(); ++a) {
    const auto& x = out.states[a];
    const T share = from_rational<T>(Rational(1, multinomial_coefficient(x)));
    // assign every item a box, x_i items per box, then move item by item
    std::vector<int> room(x.counts());
    std::function<void(int, std::map<std::vector<int>, T>)> walk =
        [&](int item, std::map<std::vector<int>, T> law) {
          if (item == N) {
            for (const auto& [y, w] : law) out.P(a, out.index.at(Composition(y))) += share * w;
            return;
          }
          for (int i = 0; i < d; ++i) {
            if (room[i] == 0) continue;
            --room[i];
            std::map<std::vector<int>, T> next;
            for (const auto& [o, w] : law)
              for (int j = 0; j < d; ++j) {
                const T& kij = item_kernels[item](i, j);
                if (kij == T(0)) continue;
                auto o2 = o;
                ++o2[j];
                auto [it, fresh] = next.try_emplace(std::move(o2), w * kij);
                if (!fresh) it->second += w * kij;
              }
            walk(item + 1, std::move(next));
            ++room[i];
          }
        };
    walk(0, {{std::vector<int>(d, 0), T(1)}});
  }
  return out;
}

/// (n_0 + Σ_l n_l ρ_l)/N with n_0 = N − |n|.
template <class T>
T single_site_eigenvalue(const MultiIndex& n, int N, const std::vector<T>& rho) {
  if (N == 0) return T(1);
  T s = from_rational<T>(Rational(N - n.order()));
  for (int l = 0; l < n.dim(); ++l) s += from_rational<T>(Rational(n[l])) * rho[l + 1];
  return s / from_rational<T>(Rational(N));
}

/// ∏_l ρ_l^{n_l}.
template <class T>
T independent_eigenvalue(const MultiIndex& n, const std::vector<T>& rho) {
  T v(1);
  for (int l = 0; l < n.dim(); ++l) v *= int_power(rho[l + 1], n[l]);
  return v;
}

/// Σ_k law(k) Σ_r ∏_l C(n_l, r_l)/C(N,k) ∏_{l≥1} ρ_l^{r_l}: the refreshed
/// slots are a uniform k-subset of the N slots labelled by n⁺.
template <class T>
T subset_eigenvalue(const MultiIndex& n, int N, const std::vector<T>& rho, const SubsetLaw& law) {
  const auto ext = n.extended(N);
  const int d = static_cast<int>(ext.size());
  T total(0);
  for (int k = 0; k <= N; ++k) {
    if (law.size_probs[k] == 0) continue;
    T inner(0);
    for (const auto& r : enumerate_compositions(d, k)) {
      BigInt ways = 1;
      for (int l = 0; l < d; ++l) ways *= binomial(ext[l], r[l]);
      if (ways == 0) continue;
      T term = from_rational<T>(Rational(ways));
      for (int l = 1; l < d; ++l) term *= int_power(rho[l], r[l]);
      inner += term;
    }
    total += from_rational<T>(law.size_probs[k] / Rational(binomial(N, k))) * inner;
  }
  return total;
}

/// Urn eigenvalue: average over dealings of ∏ over the |n| labelled slots
/// of the dealt item's β. Items are assigned labels with n⁺ counts by DP.
template <class T>
T urn_eigenvalue(const MultiIndex& n, int N, const std::vector<std::vector<T>>& betas) {
  const auto ext = n.extended(N);
  const int d = static_cast<int>(ext.size());
  std::map<std::vector<int>, T> dp{{std::vector<int>(d, 0), T(1)}};
  for (int item = 0; item < N; ++item) {
    std::map<std::vector<int>, T> next;
    for (const auto& [used, w] : dp)
      for (int l = 0; l < d; ++l) {
        if (used[l] == ext[l]) continue;
        auto u2 = used;
        ++u2[l];
        const T f = l == 0 ? w : T(w * betas[item][l - 1]);
        auto [it, fresh] = next.try_emplace(std::move(u2), f);
        if (!fresh) it->second += f;
      }
    dp = std::move(next);
  }
  return dp.at(ext) / from_rational<T>(Rational(multinomial(ext)));
}

/// A lifted chain with its eigenvalues per multi-index (graded order) and
/// the single-ball eigen-data that supplies Q_n(·,α) and Q_n(·,β).
template <class T>
struct CompositionChain {
  std::string name;
  CompositionKernel<T> kernel;
  SingleBallChain<T> base;
  std::vector<MultiIndex> indices;
  std::vector<T> lambda;
};

template <class T>
CompositionChain<T> subset_chain(const SingleBallChain<T>& base, int N, const SubsetLaw& law,
                                 const Limits& limits = {}) {
  CompositionChain<T> c{"subset", lift_kernel(base.K, N, law, limits), base,
                        enumerate_multi_indices(base.dim() - 1, N, limits), {}};
  for (const auto& n : c.indices) c.lambda.push_back(subset_eigenvalue(n, N, base.rho, law));
  return c;
}

template <class T>
CompositionChain<T> single_site_chain(const SingleBallChain<T>& base, int N,
                                      const Limits& limits = {}) {
  auto c = subset_chain(base, N, SubsetLaw::point_mass(N, N == 0 ? 0 : 1), limits);
  c.name = "single-site";
  for (std::size_t i = 0; i < c.indices.size(); ++i)
    c.lambda[i] = single_site_eigenvalue(c.indices[i], N, base.rho);
  return c;
}

template <class T>
CompositionChain<T> independent_all_chain(const SingleBallChain<T>& base, int N,
                                          const Limits& limits = {}) {
  auto c = subset_chain(base, N, SubsetLaw::point_mass(N, N), limits);
  c.name = "independent";
  for (std::size_t i = 0; i < c.indices.size(); ++i)
    c.lambda[i] = independent_eigenvalue(c.indices[i], base.rho);
  return c;
}

/// Pick k of the N balls and move each by P.
template <class T>
CompositionChain<T> ehrenfest_chain(const SingleBallChain<T>& base, int N, int k,
                                    const Limits& limits = {}) {
  auto c = subset_chain(base, N, SubsetLaw::point_mass(N, k), limits);
  c.name = "ehrenfest";
  return c;
}

/// N bulbs, flip k chosen uniformly at random.
template <class T>
CompositionChain<T> lightbulb_chain(int N, int k, const Limits& limits = {}) {
  auto c = ehrenfest_chain(flip_chain<T>(), N, k, limits);
  c.name = "lightbulb";
  return c;
}

enum class CirculantLift { single_site, all_sites };

CompositionChain<Complex> circulant_chain(const std::vector<Rational>& q, int N, CirculantLift lift,
                                          const Limits& limits = {});

/// Urn over Lancaster points of an orthonormal basis.
template <class T>
CompositionChain<T> urn_chain(const std::vector<std::vector<T>>& betas, const OrthoBasis<T>& u,
                              const ProbabilityVector& p, const Limits& limits = {}) {
  const int N = static_cast<int>(betas.size());
  std::vector<Matrix<T>> kernels;
  for (const auto& b : betas) {
    auto lk = lancaster_kernel(b, u, p);
    if (!lk.member) fail(ErrorCode::invalid_argument, "urn item outside the Lancaster set");
    kernels.push_back(std::move(lk.K));
  }
  // the base chain carries only the eigenfunctions
  SingleBallChain<T> base{"urn-basis", Matrix<T>::identity(u.dim()), p,
                          std::vector<T>(u.dim(), T(1)), u, u};
  CompositionChain<T> c{"urn", urn_kernel(kernels, N, limits), base,
                        enumerate_multi_indices(u.dim() - 1, N, limits), {}};
  for (const auto& n : c.indices) c.lambda.push_back(urn_eigenvalue(n, N, betas));
  return c;
}

/// m(x,p) on the chain's states.
template <class T>
std::vector<T> composition_weights(const CompositionKernel<T>& k, const ProbabilityVector& p) {
  const auto pv = p.as<T>();
  std::vector<T> w;
  for (const auto& x : k.states) w.push_back(multinomial_pmf<T>(x, pv));
  return w;
}

// --- the lumping oracle ----------------------------------------------------

/// A kernel on label sequences [d]^N (lexicographic order).
template <class T>
struct SequenceKernel {
  int d = 0;
  int N = 0;
  std::vector<std::vector<int>> seqs;
  Matrix<T> P;
};

inline void check_sequence_capacity(int d, int N) {
  if (d * N > 12 && !(d <= 1 || N <= 1))
    fail(ErrorCode::capacity, "sequence-space oracle is limited to d*N <= 12");
}

/// Coordinate-wise construction: a uniformly random k-subset S of the
/// coordinates (k from the law) is refreshed, each coordinate in S by K1.
template <class T>
SequenceKernel<T> sequence_subset_kernel(const Matrix<T>& K1, int N, const SubsetLaw& law) {
  law.validate(N);
  const int d = static_cast<int>(K1.rows());
  check_sequence_capacity(d, N);
  SequenceKernel<T> s{d, N, enumerate_sequences(d, N), {}};
  s.P = Matrix<T>(s.seqs.size(), s.seqs.size());
  for (std::size_t a = 0; a < s.seqs.size(); ++a)
    for (std::size_t b = 0; b < s.seqs.size(); ++b) {
      T total(0);
      for (unsigned mask = 0; mask < (1u << N); ++mask) {
        const int k = std::popcount(mask);
        if (law.size_probs[k] == 0) continue;
        T term = from_rational<T>(law.size_probs[k] / Rational(binomial(N, k)));
        for (int c = 0; c < N && !(term == T(0)); ++c) {
          if (mask & (1u << c))
            term *= K1(s.seqs[a][c], s.seqs[b][c]);
          else if (s.seqs[a][c] != s.seqs[b][c])
            term = T(0);
        }
        total += term;
      }
      s.P(a, b) = total;
    }
  return s;
}

/// (1/N!) Σ_σ ∏_c K_{σ(c)}(z_c, z'_c).
template <class T>
SequenceKernel<T> sequence_urn_kernel(const std::vector<Matrix<T>>& item_kernels) {
  const int N = static_cast<int>(item_kernels.size());
  const int d = N == 0 ? 1 : static_cast<int>(item_kernels[0].rows());
  check_sequence_capacity(d, N);
  SequenceKernel<T> s{d, N, enumerate_sequences(d, N), {}};
  s.P = Matrix<T>(s.seqs.size(), s.seqs.size());
  std::vector<int> perm(N);
  for (int i = 0; i < N; ++i) perm[i] = i;
  const T share = from_rational<T>(Rational(1, factorial(N)));
  do {
    for (std::size_t a = 0; a < s.seqs.size(); ++a)
      for (std::size_t b = 0; b < s.seqs.size(); ++b) {
        T term = share;
        for (int c = 0; c < N && !(term == T(0)); ++c)
          term *= item_kernels[perm[c]](s.seqs[a][c], s.seqs[b][c]);
        s.P(a, b) += term;
      }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return s;
}

/// Dynkin lumping onto box counts. The kernel must commute with every
/// adjacent transposition of coordinates (which generate S_N).
template <class T>
CompositionKernel<T> dynkin_lump(const SequenceKernel<T>& s, double tol = 0) {
  const int d = s.d, N = s.N;
  PositionIndex<std::vector<int>> pos(s.seqs);
  for (int c = 0; c + 1 < N; ++c)
    for (std::size_t a = 0; a < s.seqs.size(); ++a) {
      auto za = s.seqs[a];
      std::swap(za[c], za[c + 1]);
      const auto ia = pos.at(za);
      for (std::size_t b = 0; b < s.seqs.size(); ++b) {
        auto zb = s.seqs[b];
        std::swap(zb[c], zb[c + 1]);
        if (!negligible(T(s.P(a, b) - s.P(ia, pos.at(zb))), tol))
          fail(ErrorCode::symmetry_violation,
               "kernel is not invariant under swapping coordinates " + std::to_string(c + 1) +
                   " and " + std::to_string(c + 2));
      }
    }
  auto out = detail::empty_kernel<T>(d, N, {});
  for (std::size_t a = 0; a < out.states.size(); ++a) {
    const auto from = pos.at(canonical_labels(out.states[a]));
    for (std::size_t b = 0; b < s.seqs.size(); ++b)
      out.P(a, out.index.at(type_of(s.seqs[b], d))) += s.P(from, b);
  }
  return out;
}

// --- verification ------------------------------------------------------------

template <class T>
struct EigenResidual {
  MultiIndex n;
  T lambda;
  double right = 0;  // ‖K Q_n(·,α) − λ Q_n(·,α)‖_∞
  double left = 0;   // ‖(m Q_n(·,β))ᵀ K − λ (m Q_n(·,β))ᵀ‖_∞
};

template <class T>
struct EigenReport {
  std::vector<EigenResidual<T>> rows;
  double max_residual = 0;
  bool passed = true;
};

template <class T>
EigenReport<T> verify_eigen(const CompositionChain<T>& c, double tol = 1e-10) {
  const auto& k = c.kernel;
  const auto right = build_table(c.base.alpha, c.base.p, k.N);
  const auto left = build_table(c.base.beta, c.base.p, k.N);
  const auto w = composition_weights(k, c.base.p);
  const std::size_t S = k.states.size();
  EigenReport<T> rep;
  for (std::size_t a = 0; a < c.indices.size(); ++a) {
    EigenResidual<T> r{c.indices[a], c.lambda[a]};
    const auto ra = right.row_of.at(c.indices[a]);
    const auto la = left.row_of.at(c.indices[a]);
    for (std::size_t x = 0; x < S; ++x) {
      T kr(0), lk(0);
      for (std::size_t y = 0; y < S; ++y) {
        kr += k.P(x, y) * right.values(ra, right.col_of.at(k.states[y]));
        lk += w[y] * left.values(la, left.col_of.at(k.states[y])) * k.P(y, x);
      }
      const auto cx = right.col_of.at(k.states[x]);
      const T dr = kr - c.lambda[a] * right.values(ra, cx);
      const T dl = lk - c.lambda[a] * w[x] * left.values(la, left.col_of.at(k.states[x]));
      r.right = std::max(r.right, magnitude(dr));
      r.left = std::max(r.left, magnitude(dl));
      if (!negligible(dr, tol) || !negligible(dl, tol)) rep.passed = false;
    }
    rep.max_residual = std::max({rep.max_residual, r.right, r.left});
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

/// K(x,y) = m(y){1 + Σ_{n≠0} λ_n Q_n(x,α) Q_n(y,β)/C(N;n⁺)}.
template <class T>
DeviationReport spectral_reconstruction_check(const CompositionChain<T>& c, double tol = 1e-10) {
  const auto& k = c.kernel;
  const auto right = build_table(c.base.alpha, c.base.p, k.N);
  const auto left = build_table(c.base.beta, c.base.p, k.N);
  const auto w = composition_weights(k, c.base.p);
  DeviationReport r;
  for (std::size_t x = 0; x < k.states.size(); ++x)
    for (std::size_t y = 0; y < k.states.size(); ++y) {
      T s(0);
      for (std::size_t a = 0; a < c.indices.size(); ++a) {
        const auto& n = c.indices[a];
        s += c.lambda[a] * right.at(n, k.states[x]) * left.at(n, k.states[y]) /
             from_rational<T>(Rational(multinomial_extended(n, k.N)));
      }
      detail::record(r, T(k.P(x, y) - w[y] * s), tol);
    }
  return r;
}

// --- simulation ----------------------------------------------------------------

struct SimulationResult {
  std::vector<std::uint64_t> visits;  // X_0 … X_steps
  std::vector<double> empirical;
  double tv_distance = 0;
  std::size_t final_state = 0;
};

/// Seeded trajectory of a row-stochastic matrix from state x0. `on_step`
/// receives (step, state) for steps 0..steps when provided.
SimulationResult simulate(const Matrix<double>& P, const std::vector<double>& target,
                          std::size_t x0, std::uint64_t steps, std::uint64_t seed,
                          const std::function<void(std::uint64_t, std::size_t)>& on_step = {});

}  // namespace mk

#endif
