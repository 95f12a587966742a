#ifndef MK_SERIES_HPP
#define MK_SERIES_HPP

#include <span>
#include <vector>

#include "mk/combinatorics.hpp"

namespace mk {

/// A downward-closed set of exponent vectors with precomputed
/// "subtract e_l" links, used to truncate multivariate power series.
class MonomialSet {
 public:
  /// All m with 0 ≤ m ≤ n componentwise.
  static MonomialSet box(const MultiIndex& n);
  /// All m with |m| ≤ N, in graded order.
  static MonomialSet graded(int dims, int N, const Limits& limits = {});

  int dims() const { return dims_; }
  std::size_t size() const { return exps_.size(); }
  const std::vector<int>& exponent(std::size_t i) const { return exps_[i]; }
  /// Position of m − e_l, or −1 when m_l = 0.
  long below(std::size_t i, int l) const { return below_[i * dims_ + l]; }
  /// Position of m, or −1 when m is outside the set.
  long find(const std::vector<int>& m) const;

 private:
  void link();

  int dims_ = 0;
  std::vector<std::vector<int>> exps_;
  std::vector<long> below_;
  std::map<std::vector<int>, std::size_t> index_;
};

/// Truncated power series in dims variables over a MonomialSet.
template <class T>
class TruncatedSeries {
 public:
  explicit TruncatedSeries(const MonomialSet& set) : set_(&set), c_(set.size(), T(0)) {
    c_[0] = T(1);  // the zero exponent is always first
  }

  /// *this ← *this · (c0 + Σ_l c[l] w_l), truncated to the set.
  void multiply_linear(const T& c0, std::span<const T> c) {
    for (std::size_t i = set_->size(); i-- > 0;) {
      T v = c0 == T(1) ? c_[i] : T(c_[i] * c0);
      for (int l = 0; l < set_->dims(); ++l) {
        const long b = set_->below(i, l);
        if (b >= 0 && !(c[l] == T(0))) v += c[l] * c_[b];
      }
      c_[i] = v;
    }
  }

  const T& operator[](std::size_t i) const { return c_[i]; }
  const std::vector<T>& coefficients() const { return c_; }

 private:
  const MonomialSet* set_;
  std::vector<T> c_;
};

}  // namespace mk

#endif
