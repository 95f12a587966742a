#ifndef MK_TESTS_SUPPORT_HPP
#define MK_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "mk/basis.hpp"

namespace mk::testing {

inline ProbabilityVector random_p(std::mt19937_64& rng, int d, int spread = 9) {
  std::vector<Rational> w;
  Rational s = 0;
  for (int j = 0; j < d; ++j) {
    w.emplace_back(1 + static_cast<int>(rng() % spread));
    s += w.back();
  }
  for (auto& x : w) x /= s;
  return ProbabilityVector(w);
}

inline ProbabilityVector sorted_random_p(std::mt19937_64& rng, int d, int spread = 9) {
  auto v = random_p(rng, d, spread).values();
  std::sort(v.begin(), v.end(), std::greater<>());
  return ProbabilityVector(v);
}

inline ProbabilityVector pv(std::initializer_list<Rational> v) { return ProbabilityVector(v); }

}  // namespace mk::testing

#endif
