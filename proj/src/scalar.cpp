#include "mk/scalar.hpp"

#include <cstdio>

namespace mk {

std::string ScalarTraits<double>::str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string ScalarTraits<Complex>::str(const Complex& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", v.real(), v.imag());
  return buf;
}

}  // namespace mk
