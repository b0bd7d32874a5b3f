#pragma once

// Pi-values, the equivalence of variable tuples under rescaling of the
// fundamental units, canonical class representatives, and rewriting an
// invariant relation as a relation of its pi-values.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "piforge/core.hpp"
#include "piforge/error.hpp"
#include "piforge/pigroups.hpp"
#include "piforge/units.hpp"

namespace piforge {

/// Values of the r groups of a basis, stored as natural logs.
struct PiValues {
  std::vector<double> logs;

  std::size_t size() const noexcept { return logs.size(); }
  double value(std::size_t i) const { return std::exp(logs.at(i)); }
};

/// A relation on n dimensioned variables.
using Relation = std::function<bool(std::span<const Quantity>)>;
/// A relation on r dimensionless values, given as logs.
using DimensionlessRelation = std::function<bool(std::span<const double>)>;

namespace detail {
inline void check_dims(std::span<const DimVector> dims, std::span<const Quantity> xs, const char* what) {
  if (xs.size() != dims.size())
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected " + std::to_string(dims.size()) +
                                                  " values, got " + std::to_string(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(xs[i].dim() == dims[i]))
      throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": slot " + std::to_string(i) + " has dimension " +
                                                    xs[i].dim().to_string() + ", expected " + dims[i].to_string());
}

inline void check_reference(std::span<const DimVector> dims, std::span<const Quantity> ref, double tol) {
  check_dims(dims, ref, "reference");
  if (!is_consistent(ref, tol).consistent) throw Error(ErrorKind::Inconsistent, "reference list is inconsistent");
}
}  // namespace detail

inline PiValues pi_values(const PiBasis& basis, std::span<const Quantity> xs) {
  detail::check_dims(basis.dims, xs, "pi_values");
  PiValues out;
  out.logs.reserve(basis.r());
  const DimSystem& system = basis.system();
  for (const auto& g : basis.groups) out.logs.push_back(qty_combine(g, xs, system).log_magnitude());
  return out;
}

/// Coordinates of xs relative to a consistent list of units s.
inline std::vector<double> strip_units(std::span<const Quantity> s, std::span<const Quantity> xs,
                                       double tol = kDefaultTolerance) {
  if (!is_consistent(s, tol).consistent) throw Error(ErrorKind::Inconsistent, "unit list is inconsistent");
  if (s.size() != xs.size()) throw Error(ErrorKind::DimensionMismatch, "unit and value lists differ in length");
  std::vector<double> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(coordinate(xs[i], s[i]));
  return out;
}

enum class EquivalenceReason { Equivalent, DimMismatch, PiMismatch };

struct EquivalenceVerdict {
  bool equivalent = false;
  EquivalenceReason reason = EquivalenceReason::DimMismatch;
  std::size_t index = 0;  // offending slot (DimMismatch) or group (PiMismatch)
};

/// xs ~ ys iff the dimensions agree slotwise and every pi-value agrees.
inline EquivalenceVerdict equivalent(const PiBasis& basis, std::span<const Quantity> xs, std::span<const Quantity> ys,
                                     double tol = kDefaultTolerance) {
  if (xs.size() != basis.n() || ys.size() != basis.n())
    return {false, EquivalenceReason::DimMismatch, std::min(xs.size(), ys.size())};
  for (std::size_t i = 0; i < basis.n(); ++i)
    if (!(xs[i].dim() == basis.dims[i]) || !(ys[i].dim() == basis.dims[i]))
      return {false, EquivalenceReason::DimMismatch, i};
  const auto px = pi_values(basis, xs);
  const auto py = pi_values(basis, ys);
  for (std::size_t i = 0; i < px.size(); ++i)
    if (!(std::abs(px.logs[i] - py.logs[i]) <= tol)) return {false, EquivalenceReason::PiMismatch, i};
  return {true, EquivalenceReason::Equivalent, 0};
}

/// A tuple whose special pi-values are `logs`: pivot slots copy `ref`, and
/// free slot l_i is ref[l_i] rescaled by v_i / psi_i(ref).
inline std::vector<Quantity> preimage(const SpecialPiBasis& sb, std::span<const Quantity> ref,
                                      std::span<const double> logs) {
  if (logs.size() != sb.base.r()) throw Error(ErrorKind::ArityMismatch, "wrong number of pi-values");
  std::vector<Quantity> out(ref.begin(), ref.end());
  const auto at_ref = pi_values(sb.base, ref);
  for (std::size_t i = 0; i < sb.free_indices.size(); ++i) {
    const std::size_t l = sb.free_indices[i];
    out[l] = Quantity(ref[l].log_magnitude() + logs[i] - at_ref.logs[i], ref[l].dim());
  }
  return out;
}

/// The member of the class of xs whose pivot slots coincide with `ref`.
inline std::vector<Quantity> canonical_rep(const SpecialPiBasis& sb, std::span<const Quantity> ref,
                                           std::span<const Quantity> xs, double tol = kDefaultTolerance) {
  detail::check_reference(sb.base.dims, ref, tol);
  const auto pv = pi_values(sb.base, xs);
  return preimage(sb, ref, pv.logs);
}

/// g(v) := f(preimage of v). For a dimensionally invariant f this gives
/// f(xs) = g(pi_values(sb.base, xs)) everywhere.
inline DimensionlessRelation nondimensionalize(Relation f, const SpecialPiBasis& sb, std::vector<Quantity> ref,
                                               double tol = kDefaultTolerance) {
  detail::check_reference(sb.base.dims, ref, tol);
  return [f = std::move(f), sb, ref = std::move(ref)](std::span<const double> logs) {
    const auto xs = preimage(sb, ref, logs);
    return f(xs);
  };
}

}  // namespace piforge
