#pragma once

// Exact rational linear algebra: reduced row echelon form, kernels,
// linear solves and inverses over arbitrary-precision rationals.

#include <boost/multiprecision/cpp_int.hpp>

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "piforge/error.hpp"

namespace piforge {

/// Arbitrary-precision rational. Always stored in lowest terms with a
/// positive denominator; zero is 0/1.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using RVector = std::vector<Rational>;

inline std::string to_string(const Rational& q) { return q.str(); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// num/den with the sign moved to the numerator. The Boost 1.74 rational
/// adaptor rejects negative denominators.
inline Rational make_rational(BigInt num, BigInt den) {
  if (den == 0) throw Error(ErrorKind::SyntaxError, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

/// Parses "p", "-p" or "p/q" (optionally signed on either part).
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> BigInt {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      neg = s[i] == '-';
      ++i;
    }
    if (i == s.size()) throw Error(ErrorKind::SyntaxError, "bad rational '" + std::string(text) + "'");
    BigInt v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw Error(ErrorKind::SyntaxError, "bad rational '" + std::string(text) + "'");
      v = v * 10 + (s[i] - '0');
    }
    return neg ? BigInt(-v) : v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt num = parse_int(text.substr(0, slash));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw Error(ErrorKind::SyntaxError, "zero denominator in '" + std::string(text) + "'");
  return make_rational(num, den);
}

/// Dense row-major rational matrix.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}
  QMatrix(std::initializer_list<std::initializer_list<Rational>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    entries_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      assert(row.size() == cols_);
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  /// Builds a matrix whose rows are the given vectors (all of length `cols`).
  static QMatrix from_rows(std::span<const RVector> rows, std::size_t cols) {
    QMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      assert(rows[i].size() == cols);
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const Rational> entries() const noexcept { return entries_; }

  Rational& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  RVector row(std::size_t i) const {
    return RVector(entries_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                   entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }

  RVector col(std::size_t j) const {
    RVector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  QMatrix transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    for (const auto& e : entries_)
      if (e != 0) return false;
    return true;
  }

  friend bool operator==(const QMatrix&, const QMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> entries_;
};

inline QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  assert(a.cols() == b.rows());
  QMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

inline RVector operator*(const QMatrix& a, std::span<const Rational> x) {
  assert(a.cols() == x.size());
  RVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * x[j];
  return out;
}

struct RrefResult {
  QMatrix reduced;
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
};

/// Gauss-Jordan elimination. The pivot in each column is the first nonzero
/// entry at or below the current row.
inline RrefResult rref(QMatrix m) {
  RrefResult out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t p = row;
    while (p < m.rows() && m(p, col) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    const Rational inv = 1 / m(row, col);
    for (std::size_t j = col; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == 0) continue;
      const Rational f = m(i, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(row, j);
    }
    out.pivot_cols.push_back(col);
    ++row;
  }
  out.rank = out.pivot_cols.size();
  out.reduced = std::move(m);
  return out;
}

inline std::size_t rank(const QMatrix& m) { return rref(m).rank; }

/// Scales a nonzero rational vector to coprime integers, keeping its sign.
inline RVector primitive_integer(RVector v) {
  BigInt den_lcm = 1;
  for (const auto& x : v)
    if (x != 0) den_lcm = boost::multiprecision::lcm(den_lcm, denominator(x));
  BigInt num_gcd = 0;
  for (auto& x : v) {
    x *= den_lcm;
    num_gcd = boost::multiprecision::gcd(num_gcd, numerator(x));
  }
  if (num_gcd > 1)
    for (auto& x : v) x /= Rational(num_gcd);
  return v;
}

/// Free-variable kernel vectors straight from the RREF: one per free column
/// (increasing), carrying 1 at that column.
inline std::vector<RVector> kernel_vectors_unscaled(const RrefResult& r) {
  const std::size_t n = r.reduced.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : r.pivot_cols) is_pivot[c] = true;
  std::vector<RVector> out;
  for (std::size_t f = 0; f < n; ++f) {
    if (is_pivot[f]) continue;
    RVector v(n);
    v[f] = 1;
    for (std::size_t i = 0; i < r.rank; ++i) v[r.pivot_cols[i]] = -r.reduced(i, f);
    out.push_back(std::move(v));
  }
  return out;
}

/// Basis of {v : m v = 0}. Each vector is the free-variable construction
/// scaled to primitive integers; the entry at its own free column stays
/// positive. Ordered by free column.
inline std::vector<RVector> kernel_basis(const QMatrix& m) {
  auto vs = kernel_vectors_unscaled(rref(m));
  for (auto& v : vs) v = primitive_integer(std::move(v));
  return vs;
}

/// Solves a x = b exactly. Free variables are set to zero; returns nullopt
/// when b lies outside the column space of a.
inline std::optional<RVector> solve(const QMatrix& a, std::span<const Rational> b) {
  if (b.size() != a.rows())
    throw Error(ErrorKind::ArityMismatch, "solve: right-hand side has wrong length");
  QMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  const auto r = rref(std::move(aug));
  if (!r.pivot_cols.empty() && r.pivot_cols.back() == a.cols()) return std::nullopt;
  RVector x(a.cols());
  for (std::size_t i = 0; i < r.rank; ++i) x[r.pivot_cols[i]] = r.reduced(i, a.cols());
  return x;
}

/// Exact inverse, or nullopt when m is singular.
inline std::optional<QMatrix> invert(const QMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::ArityMismatch, "invert: matrix is not square");
  const std::size_t n = m.rows();
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  const auto r = rref(std::move(aug));
  if (r.rank < n || (n > 0 && r.pivot_cols[n - 1] != n - 1)) return std::nullopt;
  QMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = r.reduced(i, n + j);
  return inv;
}

}  // namespace piforge
