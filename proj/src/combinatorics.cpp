#include "mk/combinatorics.hpp"

#include <functional>
#include <numeric>

namespace mk {

Composition::Composition(std::vector<int> counts) : counts_(std::move(counts)) {
  for (int c : counts_) {
    if (c < 0)
      fail(ErrorCode::invalid_argument, "composition entries must be >= 0");
    total_ += c;
  }
}

MultiIndex::MultiIndex(std::vector<int> degrees) : degrees_(std::move(degrees)) {
  for (int n : degrees_) {
    if (n < 0) fail(ErrorCode::invalid_argument, "multi-index entries must be >= 0");
    order_ += n;
  }
}

std::vector<int> MultiIndex::extended(int N) const {
  if (order_ > N)
    fail(ErrorCode::index_out_of_range,
         "|n| = " + std::to_string(order_) + " exceeds N = " + std::to_string(N));
  std::vector<int> out;
  out.reserve(degrees_.size() + 1);
  out.push_back(N - order_);
  out.insert(out.end(), degrees_.begin(), degrees_.end());
  return out;
}

BigInt factorial(int n) {
  BigInt v = 1;
  for (int i = 2; i <= n; ++i) v *= i;
  return v;
}

BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt v = 1;
  for (int i = 1; i <= k; ++i) {
    v *= n - k + i;
    v /= i;
  }
  return v;
}

BigInt multinomial(std::span<const int> counts) {
  BigInt v = 1;
  int running = 0;
  for (int c : counts) {
    running += c;
    v *= binomial(running, c);
  }
  return v;
}

BigInt composition_count(int d, int N) {
  if (d == 0) return N == 0 ? 1 : 0;
  return binomial(d + N - 1, N);
}

namespace {

void check_capacity(const BigInt& count, const Limits& limits, const char* what) {
  if (count > BigInt(limits.max_cells))
    fail(ErrorCode::capacity, std::string(what) + " count " + count.str() +
                                  " exceeds the configured limit " +
                                  std::to_string(limits.max_cells));
}

void compositions_rec(int d, int remaining, std::vector<int>& prefix,
                      std::vector<Composition>& out) {
  if (static_cast<int>(prefix.size()) == d - 1) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    prefix.push_back(c);
    compositions_rec(d, remaining - c, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Composition> enumerate_compositions(int d, int N, const Limits& limits) {
  if (d < 0 || N < 0)
    fail(ErrorCode::invalid_argument, "enumerate_compositions needs d >= 0, N >= 0");
  std::vector<Composition> out;
  if (d == 0) {
    if (N == 0) out.emplace_back(std::vector<int>{});
    return out;
  }
  check_capacity(composition_count(d, N), limits, "composition");
  std::vector<int> prefix;
  prefix.reserve(d);
  compositions_rec(d, N, prefix, out);
  return out;
}

std::vector<MultiIndex> enumerate_multi_indices(int dims, int N, const Limits& limits) {
  if (dims < 0 || N < 0)
    fail(ErrorCode::invalid_argument, "enumerate_multi_indices needs dims >= 0, N >= 0");
  // number of n with |n| ≤ N equals C(dims+N, N)
  check_capacity(composition_count(dims + 1, N), limits, "multi-index");
  std::vector<MultiIndex> out;
  for (int k = 0; k <= N; ++k)
    for (const auto& c : enumerate_compositions(dims, k, limits))
      out.emplace_back(c.counts());
  return out;
}

std::vector<std::vector<int>> enumerate_sequences(int d, int N, const Limits& limits) {
  BigInt count = boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(N));
  check_capacity(count, limits, "sequence");
  std::vector<std::vector<int>> out;
  out.reserve(count.convert_to<std::size_t>());
  std::vector<int> seq(N, 0);
  if (d == 0) return out;
  while (true) {
    out.push_back(seq);
    int pos = N - 1;
    while (pos >= 0 && seq[pos] == d - 1) seq[pos--] = 0;
    if (pos < 0) break;
    ++seq[pos];
  }
  return out;
}

Composition type_of(std::span<const int> labels, int d) {
  std::vector<int> counts(d, 0);
  for (int l : labels) {
    if (l < 0 || l >= d) fail(ErrorCode::index_out_of_range, "label outside [d]");
    ++counts[l];
  }
  return Composition(std::move(counts));
}

std::vector<int> canonical_labels(const Composition& x) {
  std::vector<int> labels;
  labels.reserve(x.total());
  for (int j = 0; j < x.dim(); ++j)
    for (int c = 0; c < x[j]; ++c) labels.push_back(j);
  return labels;
}

}  // namespace mk
