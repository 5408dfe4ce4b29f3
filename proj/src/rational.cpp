#include "psclt/rational.hpp"

#include <cmath>

#include "psclt/error.hpp"

namespace psclt {

RationalMatrix RationalMatrix::transposed() const {
  RationalMatrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

namespace {

// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t pick = row;
    while (pick < m.rows && m(pick, col) == 0) ++pick;
    if (pick == m.rows) continue;
    if (pick != row)
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(pick, j), m(row, j));
    const Rational lead = m(row, col);
    for (std::size_t j = 0; j < m.cols; ++j) m(row, j) /= lead;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == row || m(i, col) == 0) continue;
      const Rational f = m(i, col);
      for (std::size_t j = 0; j < m.cols; ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::vector<std::vector<Rational>> nullspace(RationalMatrix m) {
  const auto pivots = rref(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < m.cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(m.cols);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RationalMatrix> inverse(RationalMatrix m) {
  const std::size_t n = m.rows;
  RationalMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  const auto pivots = rref(aug);
  if (pivots.size() < n || (n > 0 && pivots[n - 1] != n - 1)) return std::nullopt;
  RationalMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

std::optional<Rational> rational_approximation(double x, long max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  for (long d = 1; d <= max_den; ++d) {
    const double num = std::round(x * static_cast<double>(d));
    if (std::abs(num / static_cast<double>(d) - x) <= tol * std::max(1.0, std::abs(x))) {
      Rational q(static_cast<long>(num), d);
      q.canonicalize();
      return q;
    }
  }
  return std::nullopt;
}

std::vector<Rational> cesaro_limit_exact(const RationalMatrix& m, const Rational& lambda,
                                         const std::vector<Rational>& v, bool transpose) {
  const std::size_t n = m.rows;
  RationalMatrix shifted = transpose ? m.transposed() : m;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= lambda;
  const auto right = nullspace(shifted);
  const auto left = nullspace(shifted.transposed());
  if (right.empty() || right.size() != left.size())
    throw Error(ErrorCode::DegenerateSpectrum, "lambda is not an eigenvalue");
  const std::size_t k = right.size();
  RationalMatrix gram(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t i = 0; i < n; ++i) gram(a, b) += left[a][i] * right[b][i];
  const auto g_inv = inverse(gram);
  if (!g_inv) throw Error(ErrorCode::DegenerateSpectrum, "lambda is not semisimple");
  std::vector<Rational> lv(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < n; ++i) lv[a] += left[a][i] * v[i];
  std::vector<Rational> coeff(k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) coeff[a] += (*g_inv)(a, b) * lv[b];
  std::vector<Rational> out(n);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t i = 0; i < n; ++i) out[i] += right[a][i] * coeff[a];
  return out;
}

}  // namespace psclt
