#ifndef MK_COMBINATORICS_HPP
#define MK_COMBINATORICS_HPP

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "mk/errors.hpp"
#include "mk/rational.hpp"
#include "mk/scalar.hpp"

namespace mk {

/// Ball counts per box: a point of the multinomial sample space χ(d,N).
class Composition {
 public:
  Composition() = default;
  explicit Composition(std::vector<int> counts);

  int dim() const { return static_cast<int>(counts_.size()); }
  int total() const { return total_; }
  int operator[](std::size_t j) const { return counts_[j]; }
  const std::vector<int>& counts() const { return counts_; }

  friend bool operator==(const Composition&, const Composition&) = default;
  friend auto operator<=>(const Composition& a, const Composition& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  std::vector<int> counts_;
  int total_ = 0;
};

/// Polynomial degree index n = (n_1, …, n_{d-1}).
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> degrees);

  int dim() const { return static_cast<int>(degrees_.size()); }
  int order() const { return order_; }  // |n|
  int operator[](std::size_t l) const { return degrees_[l]; }
  const std::vector<int>& degrees() const { return degrees_; }

  /// n⁺ = (N − |n|, n_1, …, n_{d-1}).
  std::vector<int> extended(int N) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
    return a.degrees_ <=> b.degrees_;
  }

 private:
  std::vector<int> degrees_;
  int order_ = 0;
};

/// Upper bound on the number of enumerated states or table cells.
struct Limits {
  std::size_t max_cells = 10'000'000;
};

BigInt factorial(int n);
BigInt binomial(int n, int k);
/// N! / ∏ k_i!, N = Σ k_i.
BigInt multinomial(std::span<const int> counts);

/// C(d+N-1, N).
BigInt composition_count(int d, int N);

/// All x with |x| = N in lexicographically descending order, e.g.
/// (2,0), (1,1), (0,2). d = 0 yields the empty composition for N = 0 only.
std::vector<Composition> enumerate_compositions(int d, int N,
                                                const Limits& limits = {});

/// All n with |n| ≤ N in graded order: by |n| ascending, then
/// lexicographically descending within a degree.
std::vector<MultiIndex> enumerate_multi_indices(int dims, int N,
                                                const Limits& limits = {});

/// All label sequences in [d]^N (0-based labels), lexicographic.
std::vector<std::vector<int>> enumerate_sequences(int d, int N,
                                                  const Limits& limits = {});

/// Box counts of a label sequence.
Composition type_of(std::span<const int> labels, int d);

/// Sorted label sequence with type x (label j repeated x_j times).
std::vector<int> canonical_labels(const Composition& x);

/// Position lookup for an ordered state list.
template <class Key>
class PositionIndex {
 public:
  PositionIndex() = default;
  explicit PositionIndex(const std::vector<Key>& keys) {
    for (std::size_t i = 0; i < keys.size(); ++i) index_.emplace(keys[i], i);
  }
  std::size_t at(const Key& k) const {
    auto it = index_.find(k);
    if (it == index_.end())
      fail(ErrorCode::index_out_of_range, "state not in enumeration");
    return it->second;
  }
  bool contains(const Key& k) const { return index_.count(k) != 0; }
  std::size_t size() const { return index_.size(); }

 private:
  std::map<Key, std::size_t> index_;
};

/// N! / ∏ x_j!, exact.
inline BigInt multinomial_coefficient(const Composition& x) {
  return multinomial(x.counts());
}

/// m(x, p) = C(N; x) ∏ p_j^{x_j}.
template <class T>
T multinomial_pmf(const Composition& x, std::span<const T> p) {
  if (static_cast<std::size_t>(x.dim()) != p.size())
    fail(ErrorCode::dimension_mismatch,
         "composition has " + std::to_string(x.dim()) + " boxes, p has " +
             std::to_string(p.size()));
  T v = from_rational<T>(Rational(multinomial_coefficient(x)));
  for (std::size_t j = 0; j < p.size(); ++j)
    for (int e = 0; e < x[j]; ++e) v *= p[j];
  return v;
}

enum class Direction { rising, falling };

/// a(a+1)…(a+k-1) or a(a-1)…(a-k+1); 1 at k = 0.
template <class T>
T pochhammer(const T& a, int k, Direction dir = Direction::rising) {
  T v(1);
  for (int i = 0; i < k; ++i) {
    const T step(dir == Direction::rising ? i : -i);
    v *= a + step;
  }
  return v;
}

template <class T>
T int_power(const T& base, int e) {
  T v(1);
  for (int i = 0; i < e; ++i) v *= base;
  return v;
}

}  // namespace mk

#endif
