#pragma once

// Dimensions, positive quantities and fixed-coefficient monomial maps.
//
// Quantities live in log space: a positive magnitude v is stored as log(v),
// which turns products into sums and rational powers into scalings. The
// dimension part is always exact.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "piforge/error.hpp"
#include "piforge/exactlin.hpp"

namespace piforge {

inline constexpr double kDefaultTolerance = 1e-9;

/// Decimal rendering with 15 significant digits.
inline std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

/// Ordered list of fundamental dimension names (e.g. M, L, T).
class DimSystem {
 public:
  explicit DimSystem(std::vector<std::string> names)
      : names_(std::make_shared<const std::vector<std::string>>(std::move(names))) {
    if (names_->empty()) throw Error(ErrorKind::SpecError, "dimension system needs at least one name");
    for (std::size_t i = 0; i < names_->size(); ++i) {
      if ((*names_)[i].empty()) throw Error(ErrorKind::SpecError, "empty fundamental name");
      for (std::size_t j = 0; j < i; ++j)
        if ((*names_)[i] == (*names_)[j])
          throw Error(ErrorKind::SpecError, "duplicate fundamental name '" + (*names_)[i] + "'");
    }
  }

  std::size_t size() const noexcept { return names_->size(); }
  const std::vector<std::string>& names() const noexcept { return *names_; }
  const std::string& name(std::size_t i) const { return (*names_)[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = std::find(names_->begin(), names_->end(), name);
    if (it == names_->end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_->begin());
  }

  friend bool operator==(const DimSystem& a, const DimSystem& b) {
    return a.names_ == b.names_ || *a.names_ == *b.names_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

/// An element of the dimension space: one rational exponent per fundamental.
class DimVector {
 public:
  explicit DimVector(DimSystem system) : system_(std::move(system)), exps_(system_.size()) {}
  DimVector(DimSystem system, RVector exponents) : system_(std::move(system)), exps_(std::move(exponents)) {
    if (exps_.size() != system_.size())
      throw Error(ErrorKind::ArityMismatch, "exponent count does not match dimension system");
  }

  static DimVector zero(const DimSystem& system) { return DimVector(system); }
  static DimVector unit(const DimSystem& system, std::size_t index) {
    DimVector d(system);
    d.exps_.at(index) = 1;
    return d;
  }

  const DimSystem& system() const noexcept { return system_; }
  const RVector& exponents() const noexcept { return exps_; }
  const Rational& operator[](std::size_t i) const { return exps_[i]; }

  bool is_zero() const {
    return std::all_of(exps_.begin(), exps_.end(), [](const Rational& q) { return q == 0; });
  }

  DimVector& operator+=(const DimVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < exps_.size(); ++i) exps_[i] += o.exps_[i];
    return *this;
  }
  DimVector& operator-=(const DimVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < exps_.size(); ++i) exps_[i] -= o.exps_[i];
    return *this;
  }
  DimVector& operator*=(const Rational& s) {
    for (auto& e : exps_) e *= s;
    return *this;
  }

  friend DimVector operator+(DimVector a, const DimVector& b) { return a += b; }
  friend DimVector operator-(DimVector a, const DimVector& b) { return a -= b; }
  friend DimVector operator*(DimVector a, const Rational& s) { return a *= s; }
  friend DimVector operator-(DimVector a) { return a *= Rational(-1); }

  friend bool operator==(const DimVector& a, const DimVector& b) {
    return a.system_ == b.system_ && a.exps_ == b.exps_;
  }

  /// Normalized form, e.g. "M*L^2*T^-2", "L^(1/2)", or "1".
  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < exps_.size(); ++i) {
      const Rational& e = exps_[i];
      if (e == 0) continue;
      if (!out.empty()) out += '*';
      out += system_.name(i);
      if (e == 1) continue;
      out += '^';
      if (denominator(e) == 1)
        out += piforge::to_string(e);
      else
        out += "(" + piforge::to_string(e) + ")";
    }
    return out.empty() ? "1" : out;
  }

 private:
  void check_same(const DimVector& o) const {
    if (!(system_ == o.system_)) throw Error(ErrorKind::SystemMismatch, "dimension vectors from different systems");
  }

  DimSystem system_;
  RVector exps_;
};

/// A positive physical quantity: natural log of the magnitude plus its
/// dimension. log_magnitude 0 with a zero dimension is the neutral element.
class Quantity {
 public:
  Quantity(double log_magnitude, DimVector dim) : log_(log_magnitude), dim_(std::move(dim)) {
    if (!std::isfinite(log_)) throw Error(ErrorKind::NonPositive, "quantity magnitude must be positive and finite");
  }

  static Quantity from_magnitude(double magnitude, DimVector dim) {
    if (!(magnitude > 0) || !std::isfinite(magnitude))
      throw Error(ErrorKind::NonPositive, "quantity magnitude must be positive and finite");
    return Quantity(std::log(magnitude), std::move(dim));
  }

  static Quantity one(const DimSystem& system) { return Quantity(0.0, DimVector::zero(system)); }

  double log_magnitude() const noexcept { return log_; }
  double magnitude() const { return std::exp(log_); }
  const DimVector& dim() const noexcept { return dim_; }

  Quantity& operator*=(const Quantity& o) {
    dim_ += o.dim_;
    log_ += o.log_;
    return *this;
  }
  friend Quantity operator*(Quantity a, const Quantity& b) { return a *= b; }

  Quantity pow(const Rational& beta) const { return Quantity(log_ * to_double(beta), dim_ * beta); }

  /// Same dimension, and magnitudes within `tol` in log space.
  bool approx_equal(const Quantity& o, double tol = kDefaultTolerance) const {
    return dim_ == o.dim_ && std::abs(log_ - o.log_) <= tol;
  }

 private:
  double log_;
  DimVector dim_;
};

/// The map (x_1..x_k) -> x_1^c_1 ... x_k^c_k, identified with its
/// coefficient vector. A zero-length vector is the 0-input map onto 1.
class Fclcf {
 public:
  Fclcf() = default;
  explicit Fclcf(RVector coefficients) : coeffs_(std::move(coefficients)) {}

  /// The projection onto input i of an n-input map.
  static Fclcf projection(std::size_t n, std::size_t i) {
    RVector c(n);
    c.at(i) = 1;
    return Fclcf(std::move(c));
  }

  std::size_t arity() const noexcept { return coeffs_.size(); }
  const RVector& coefficients() const noexcept { return coeffs_; }
  const Rational& operator[](std::size_t i) const { return coeffs_[i]; }

  friend bool operator==(const Fclcf&, const Fclcf&) = default;

 private:
  RVector coeffs_;
};

inline DimVector project(const Quantity& x) { return x.dim(); }

inline DimVector dim_combine(const Fclcf& p, std::span<const DimVector> ws, const DimSystem& system) {
  if (p.arity() != ws.size()) throw Error(ErrorKind::ArityMismatch, "map arity does not match input count");
  DimVector out = DimVector::zero(system);
  for (std::size_t i = 0; i < ws.size(); ++i)
    if (p[i] != 0) out += ws[i] * p[i];
  return out;
}

/// Needs at least one input to know the dimension system.
inline DimVector dim_combine(const Fclcf& p, std::span<const DimVector> ws) {
  if (ws.empty()) {
    if (p.arity() != 0) throw Error(ErrorKind::ArityMismatch, "map arity does not match input count");
    throw Error(ErrorKind::EmptyList, "dimension system unknown for an empty input list");
  }
  return dim_combine(p, ws, ws.front().system());
}

inline Quantity qty_combine(const Fclcf& p, std::span<const Quantity> xs, const DimSystem& system) {
  if (p.arity() != xs.size()) throw Error(ErrorKind::ArityMismatch, "map arity does not match input count");
  double log = 0.0;
  DimVector dim = DimVector::zero(system);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (p[i] == 0) continue;
    log += to_double(p[i]) * xs[i].log_magnitude();
    dim += xs[i].dim() * p[i];
  }
  return Quantity(log, std::move(dim));
}

inline Quantity qty_combine(const Fclcf& p, std::span<const Quantity> xs) {
  if (xs.empty()) {
    if (p.arity() != 0) throw Error(ErrorKind::ArityMismatch, "map arity does not match input count");
    throw Error(ErrorKind::EmptyList, "dimension system unknown for an empty input list");
  }
  return qty_combine(p, xs, xs.front().dim().system());
}

/// The unique dimensionless a with a * s = x.
inline double coordinate(const Quantity& x, const Quantity& s) {
  if (!(x.dim() == s.dim()))
    throw Error(ErrorKind::DimensionMismatch, x.dim().to_string() + " vs " + s.dim().to_string());
  return std::exp(x.log_magnitude() - s.log_magnitude());
}

/// d x n matrix whose column i holds the exponents of ws[i].
inline QMatrix dimension_matrix(const DimSystem& system, std::span<const DimVector> ws) {
  QMatrix a(system.size(), ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (!(ws[i].system() == system)) throw Error(ErrorKind::SystemMismatch, "dimension from a different system");
    for (std::size_t j = 0; j < system.size(); ++j) a(j, i) = ws[i][j];
  }
  return a;
}

inline std::vector<DimVector> dims_of(std::span<const Quantity> xs) {
  std::vector<DimVector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.dim());
  return out;
}

}  // namespace piforge
