#include "mk/chains.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mk {

namespace {

Rational tail_sum(const ProbabilityVector& p, int from) {
  Rational s = 0;
  for (int j = from; j < p.size(); ++j) s += p[j];
  return s;
}

void require_sorted(const ProbabilityVector& p) {
  if (!p.descending())
    fail(ErrorCode::unsorted_probability, "the Metropolis chain needs p_1 >= ... >= p_d");
}

}  // namespace

Matrix<Rational> metropolis_kernel(const ProbabilityVector& p) {
  require_sorted(p);
  const int d = p.size();
  Matrix<Rational> K(d, d);
  for (int i = 0; i < d; ++i) {
    Rational stay = 1;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      const Rational ratio = p[j] / p[i];
      K(i, j) = (ratio < 1 ? ratio : Rational(1)) / d;
      stay -= K(i, j);
    }
    K(i, i) = stay;
  }
  return K;
}

std::vector<Rational> metropolis_eigenvalues(const ProbabilityVector& p) {
  require_sorted(p);
  const int d = p.size();
  std::vector<Rational> b{Rational(1)};
  for (int l = 1; l < d; ++l)
    b.push_back(Rational(d - l + 1, d) - tail_sum(p, l - 1) / (Rational(d) * p[l - 1]));
  return b;
}

std::vector<Rational> metropolis_printed_eigenvalues(const ProbabilityVector& p) {
  require_sorted(p);
  const int d = p.size();
  std::vector<Rational> b{Rational(1)};
  for (int l = 1; l < d; ++l) b.push_back(1 - tail_sum(p, l - 1) / (Rational(d) * p[l - 1]));
  return b;
}

HoareRahmannKernel hoare_rahmann_kernel(const std::vector<Rational>& alpha,
                                        const std::vector<Rational>& theta) {
  const std::size_t d = theta.size();
  if (alpha.size() != d) fail(ErrorCode::dimension_mismatch, "alpha and theta differ in length");
  const ProbabilityVector th(theta);
  std::vector<Rational> w(d);
  Rational total = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (alpha[i] < 0 || alpha[i] >= 1)
      fail(ErrorCode::invalid_argument, "alpha_" + std::to_string(i + 1) + " must lie in [0,1)");
    w[i] = th[i] / (1 - alpha[i]);
    total += w[i];
  }
  for (auto& v : w) v /= total;
  Matrix<Rational> K(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      K(i, j) = (i == j ? alpha[i] : Rational(0)) + (1 - alpha[i]) * th[j];
  return {std::move(K), ProbabilityVector(std::move(w))};
}

SingleBallChain<double> reversible_eigensystem(const Matrix<Rational>& K, const ProbabilityVector& p,
                                               std::string name) {
  const int d = p.size();
  if (static_cast<int>(K.rows()) != d || static_cast<int>(K.cols()) != d)
    fail(ErrorCode::dimension_mismatch, "kernel and p differ in size");
  const auto pr = K.map([](const Rational& v) { return to_double(v); });
  std::vector<Rational> pi(p.values().begin(), p.values().end());
  if (!check_kernel(K, pi).reversible)
    fail(ErrorCode::reversibility_violation, "kernel is not reversible with respect to p");
  std::vector<double> sp(d);
  for (int i = 0; i < d; ++i) sp[i] = std::sqrt(to_double(p[i]));

  // cyclic Jacobi on S = D^{1/2} K D^{-1/2}
  Matrix<double> S(d, d), V = Matrix<double>::identity(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S(i, j) = sp[i] * pr(i, j) / sp[j];
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) S(i, j) = S(j, i) = 0.5 * (S(i, j) + S(j, i));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) off += S(i, j) * S(i, j);
    if (off < 1e-30) break;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        if (std::abs(S(a, b)) < 1e-300) continue;
        const double theta = (S(b, b) - S(a, a)) / (2 * S(a, b));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (int k = 0; k < d; ++k) {
          const double ska = S(k, a), skb = S(k, b);
          S(k, a) = c * ska - s * skb;
          S(k, b) = s * ska + c * skb;
        }
        for (int k = 0; k < d; ++k) {
          const double sak = S(a, k), sbk = S(b, k);
          S(a, k) = c * sak - s * sbk;
          S(b, k) = s * sak + c * sbk;
        }
        for (int k = 0; k < d; ++k) {
          const double vka = V(k, a), vkb = V(k, b);
          V(k, a) = c * vka - s * vkb;
          V(k, b) = s * vka + c * vkb;
        }
      }
  }
  // the stationary direction √p goes first, the rest by decreasing eigenvalue
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  int top = 0;
  double best = -1;
  for (int k = 0; k < d; ++k) {
    double overlap = 0;
    for (int i = 0; i < d; ++i) overlap += V(i, k) * sp[i];
    if (std::abs(overlap) > best) best = std::abs(overlap), top = k;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if ((a == top) != (b == top)) return a == top;
    return S(a, a) > S(b, b);
  });
  Matrix<double> rows(d, d);
  std::vector<double> rho;
  for (int r = 0; r < d; ++r) {
    const int k = order[r];
    rho.push_back(r == 0 ? 1.0 : S(k, k));
    double sign = 1;
    for (int i = 0; i < d; ++i)
      if (std::abs(V(i, k)) > 1e-12) {
        sign = V(i, k) < 0 ? -1 : 1;
        break;
      }
    for (int i = 0; i < d; ++i) rows(r, i) = sign * V(i, k) / sp[i];
  }
  for (int i = 0; i < d; ++i) rows(0, i) = 1;
  OrthoBasis<double> u(rows, std::vector<double>(d, 1.0), name + "-eigen");
  return {std::move(name), pr, p, std::move(rho), u, u};
}

Matrix<Rational> circulant_kernel(const std::vector<Rational>& q) {
  const std::size_t d = q.size();
  if (d == 0) fail(ErrorCode::invalid_probability, "step law is empty");
  Rational s = 0;
  for (const auto& v : q) {
    if (v < 0) fail(ErrorCode::invalid_probability, "step law has a negative entry");
    s += v;
  }
  if (s != 1) fail(ErrorCode::invalid_probability, "step law sums to " + to_string(s));
  Matrix<Rational> K(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) K(a, b) = q[(b + d - a) % d];
  return K;
}

std::vector<Complex> circulant_eigenvalues(const std::vector<Rational>& q) {
  const std::size_t d = q.size();
  std::vector<Complex> eta;
  for (std::size_t k = 0; k < d; ++k) {
    Complex s = 0;
    for (std::size_t r = 0; r < d; ++r)
      s += to_double(q[r]) * std::polar(1.0, 2 * std::numbers::pi * double((r * k) % d) / double(d));
    eta.push_back(k == 0 ? Complex(1) : s);
  }
  return eta;
}

SingleBallChain<Complex> circulant_chain_base(const std::vector<Rational>& q) {
  const auto K = circulant_kernel(q);
  const std::size_t d = q.size();
  Matrix<Complex> a(d, d), b(d, d);
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t x = 0; x < d; ++x) {
      const double angle = 2 * std::numbers::pi * double((l * x) % d) / double(d);
      a(l, x) = std::polar(1.0, angle);
      b(l, x) = std::polar(1.0, -angle);
    }
  std::vector<Complex> ones(d, Complex(1));
  return {"circulant", K.map([](const Rational& v) { return from_rational<Complex>(v); }),
          ProbabilityVector::uniform(static_cast<int>(d)), circulant_eigenvalues(q),
          OrthoBasis<Complex>(a, ones, "fourier-right"), OrthoBasis<Complex>(b, ones, "fourier-left")};
}

SubsetLaw SubsetLaw::point_mass(int N, int k) {
  if (k < 0 || k > N) fail(ErrorCode::invalid_argument, "k must lie in 0..N");
  SubsetLaw law;
  law.size_probs.assign(N + 1, Rational(0));
  law.size_probs[k] = 1;
  return law;
}

void SubsetLaw::validate(int N) const {
  if (static_cast<int>(size_probs.size()) != N + 1)
    fail(ErrorCode::dimension_mismatch, "subset law needs N+1 entries");
  Rational s = 0;
  for (const auto& v : size_probs) {
    if (v < 0) fail(ErrorCode::invalid_probability, "subset law has a negative entry");
    s += v;
  }
  if (s != 1) fail(ErrorCode::invalid_probability, "subset law sums to " + to_string(s));
}

CompositionChain<Complex> circulant_chain(const std::vector<Rational>& q, int N, CirculantLift lift,
                                          const Limits& limits) {
  const auto base = circulant_chain_base(q);
  auto c = lift == CirculantLift::single_site ? single_site_chain(base, N, limits)
                                              : independent_all_chain(base, N, limits);
  c.name = lift == CirculantLift::single_site ? "circulant-single-site" : "circulant-all-sites";
  return c;
}

SimulationResult simulate(const Matrix<double>& P, const std::vector<double>& target,
                          std::size_t x0, std::uint64_t steps, std::uint64_t seed,
                          const std::function<void(std::uint64_t, std::size_t)>& on_step) {
  const std::size_t S = P.rows();
  if (x0 >= S) fail(ErrorCode::index_out_of_range, "start state out of range");
  if (target.size() != S) fail(ErrorCode::dimension_mismatch, "target has the wrong length");
  std::vector<std::vector<double>> cum(S, std::vector<double>(S));
  for (std::size_t i = 0; i < S; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < S; ++j) cum[i][j] = acc += P(i, j);
  }
  std::mt19937_64 rng(seed);
  SimulationResult r;
  r.visits.assign(S, 0);
  std::size_t x = x0;
  ++r.visits[x];
  if (on_step) on_step(0, x);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * cum[x][S - 1];
    const auto it = std::upper_bound(cum[x].begin(), cum[x].end(), u);
    std::size_t y = static_cast<std::size_t>(it - cum[x].begin());
    // rounding can leave u at the top edge; fall back to the last positive entry
    if (y >= S) {
      y = S - 1;
      while (y > 0 && P(x, y) <= 0) --y;
    }
    x = y;
    ++r.visits[x];
    if (on_step) on_step(t, x);
  }
  r.final_state = x;
  const double total = static_cast<double>(steps + 1);
  for (std::size_t i = 0; i < S; ++i) {
    r.empirical.push_back(static_cast<double>(r.visits[i]) / total);
    r.tv_distance += std::abs(r.empirical.back() - target[i]);
  }
  r.tv_distance /= 2;
  return r;
}

}  // namespace mk
