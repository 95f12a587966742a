#include "mk/series.hpp"

#include <algorithm>

namespace mk {

MonomialSet MonomialSet::box(const MultiIndex& n) {
  MonomialSet s;
  s.dims_ = n.dim();
  std::vector<int> m(s.dims_, 0);
  // graded enumeration keeps every m − e_l ahead of m
  std::vector<std::vector<int>> all;
  while (true) {
    all.push_back(m);
    int pos = s.dims_ - 1;
    while (pos >= 0 && m[pos] == n[pos]) m[pos--] = 0;
    if (pos < 0) break;
    ++m[pos];
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    int sa = 0, sb = 0;
    for (int v : a) sa += v;
    for (int v : b) sb += v;
    return sa < sb;
  });
  s.exps_ = std::move(all);
  s.link();
  return s;
}

MonomialSet MonomialSet::graded(int dims, int N, const Limits& limits) {
  MonomialSet s;
  s.dims_ = dims;
  for (const auto& n : enumerate_multi_indices(dims, N, limits)) s.exps_.push_back(n.degrees());
  s.link();
  return s;
}

void MonomialSet::link() {
  for (std::size_t i = 0; i < exps_.size(); ++i) index_.emplace(exps_[i], i);
  below_.assign(exps_.size() * dims_, -1);
  for (std::size_t i = 0; i < exps_.size(); ++i)
    for (int l = 0; l < dims_; ++l) {
      if (exps_[i][l] == 0) continue;
      auto m = exps_[i];
      --m[l];
      below_[i * dims_ + l] = find(m);
    }
}

long MonomialSet::find(const std::vector<int>& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

}  // namespace mk
