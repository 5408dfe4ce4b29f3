#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace psclt {

using Rational = mpq_class;

struct RationalMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> a;

  RationalMatrix() = default;
  RationalMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
  Rational& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  RationalMatrix transposed() const;
};

/// Basis of the right kernel, one vector per free column of the reduced echelon form.
std::vector<std::vector<Rational>> nullspace(RationalMatrix m);

/// Inverse of a square matrix, or nullopt when singular.
std::optional<RationalMatrix> inverse(RationalMatrix m);

/// Best rational approximation with denominator <= max_den, if within tol.
std::optional<Rational> rational_approximation(double x, long max_den = 1000, double tol = 1e-9);

/// lim (1/(n+1)) sum_{k<=n} M^k v / lambda^k for an eigenvalue lambda of maximal modulus,
/// computed as the spectral projector R (L^T R)^-1 L^T v. With transpose, M^T is used.
/// Throws DegenerateSpectrum when lambda is not a semisimple eigenvalue.
std::vector<Rational> cesaro_limit_exact(const RationalMatrix& m, const Rational& lambda,
                                         const std::vector<Rational>& v, bool transpose = false);

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace psclt
