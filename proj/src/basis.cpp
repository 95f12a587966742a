#include "mk/basis.hpp"

#include <bit>

namespace mk {

ProbabilityVector::ProbabilityVector(std::vector<Rational> p, const Rational& sum_tol)
    : p_(std::move(p)) {
  if (p_.empty()) fail(ErrorCode::invalid_probability, "probability vector is empty");
  Rational sum = 0;
  for (std::size_t j = 0; j < p_.size(); ++j) {
    if (p_[j] <= 0)
      fail(ErrorCode::invalid_probability,
           "p_" + std::to_string(j + 1) + " = " + to_string(p_[j]) + " is not positive");
    sum += p_[j];
  }
  Rational gap = sum - 1;
  if (gap < 0) gap = -gap;
  if (gap > sum_tol)
    fail(ErrorCode::invalid_probability, "probabilities sum to " + to_string(sum) + ", not 1");
}

ProbabilityVector ProbabilityVector::uniform(int d) {
  return ProbabilityVector(std::vector<Rational>(d, Rational(1, d)));
}

bool ProbabilityVector::descending() const {
  for (std::size_t j = 1; j < p_.size(); ++j)
    if (p_[j] > p_[j - 1]) return false;
  return true;
}

OrthoBasis<Rational> basis_from_rows(const Matrix<Rational>& rows, const ProbabilityVector& p,
                                     std::string label) {
  if (rows.rows() != static_cast<std::size_t>(p.size()) || rows.cols() != rows.rows())
    fail(ErrorCode::dimension_mismatch, "basis rows must be d x d");
  auto w = basis_weights(rows, p);
  return OrthoBasis<Rational>(rows, std::move(w), std::move(label));
}

bool is_strongly_monotone(std::span<const Rational> p) {
  Rational tail = 0;
  for (std::size_t k = p.size(); k-- > 1;) {
    tail += p[k];
    if (tail > p[k - 1]) return false;
  }
  return true;
}

std::vector<MonotoneExtreme> strongly_monotone_extremes(int d) {
  if (d < 1) fail(ErrorCode::invalid_argument, "d must be >= 1");
  std::vector<MonotoneExtreme> out;
  for (int k = 1; k <= d; ++k) {
    MonotoneExtreme e;
    e.weights.assign(d, Rational(0));
    // first k entries: 1/2, 1/4, …, 1/2^{k-1}, 1/2^{k-1}
    Rational w = 1;
    for (int j = 0; j < k - 1; ++j) {
      w /= 2;
      e.weights[j] = w;
    }
    e.weights[k - 1] = w;
    e.boundary = k < d;
    out.push_back(std::move(e));
  }
  return out;
}

CharacterTable s3_character_table() {
  CharacterTable t;
  t.name = "S3";
  t.chi = Matrix<Rational>(3, 3);
  const int vals[3][3] = {{1, 1, 1}, {0, -1, 2}, {-1, 1, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.chi(i, j) = vals[i][j];
  t.class_sizes = {3, 2, 1};  // transpositions, 3-cycles, identity
  return t;
}

CharacterTable c2n_character_table(int n) {
  if (n < 0 || n > 10) fail(ErrorCode::invalid_argument, "C_2^n needs 0 <= n <= 10");
  const unsigned d = 1u << n;
  CharacterTable t;
  t.name = "C2^" + std::to_string(n);
  t.chi = Matrix<Rational>(d, d);
  for (unsigned x = 0; x < d; ++x)
    for (unsigned col = 0; col < d; ++col) {
      unsigned y = d - 1 - col;  // identity (y = 0) in the last column
      t.chi(x, col) = std::popcount(x & y) % 2 ? -1 : 1;
    }
  t.class_sizes.assign(d, 1);
  return t;
}

void validate_character_table(const CharacterTable& table) {
  const std::size_t d = table.chi.rows();
  if (d == 0 || table.chi.cols() != d || table.class_sizes.size() != d)
    fail(ErrorCode::invalid_character_data, "character table must be d x d with d class sizes");
  BigInt order = 0;
  for (const auto& c : table.class_sizes) {
    if (c <= 0) fail(ErrorCode::invalid_character_data, "class sizes must be positive");
    order += c;
  }
  if (table.class_sizes[d - 1] != 1)
    fail(ErrorCode::invalid_character_data, "last class must be the identity (size 1)");
  for (std::size_t j = 0; j < d; ++j)
    if (table.chi(0, j) != 1)
      fail(ErrorCode::invalid_character_data, "first row must be the trivial character");
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = i; k < d; ++k) {
      Rational s = 0;
      for (std::size_t j = 0; j < d; ++j)
        s += table.chi(i, j) * table.chi(k, j) * Rational(table.class_sizes[j]);
      Rational expect = i == k ? Rational(order) : Rational(0);
      if (s != expect)
        fail(ErrorCode::invalid_character_data,
             "rows " + std::to_string(i + 1) + " and " + std::to_string(k + 1) +
                 " violate the orthogonality relations");
    }
}

OrthoBasis<Rational> hadamard4_basis() {
  const int vals[4][4] = {{1, 1, 1, 1}, {-1, 1, -1, 1}, {1, 1, -1, -1}, {-1, 1, 1, -1}};
  Matrix<Rational> rows(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rows(i, j) = vals[i][j];
  return basis_from_rows(rows, ProbabilityVector::uniform(4), "hadamard4");
}

}  // namespace mk
