#pragma once

// Bases of the space of dimensionless monomials (pi-groups) over a list of
// dimensions, special bases, and transitions between bases.

#include <span>
#include <vector>

#include "piforge/core.hpp"
#include "piforge/error.hpp"
#include "piforge/exactlin.hpp"

namespace piforge {

struct PiBasis {
  std::vector<DimVector> dims;  // w_1..w_n
  std::vector<Fclcf> groups;    // r groups, each of arity n

  std::size_t n() const noexcept { return dims.size(); }
  std::size_t r() const noexcept { return groups.size(); }
  const DimSystem& system() const { return dims.front().system(); }

  /// r x n matrix whose rows are the group coefficients.
  QMatrix coefficient_matrix() const {
    std::vector<RVector> rows;
    rows.reserve(groups.size());
    for (const auto& g : groups) rows.push_back(g.coefficients());
    return QMatrix::from_rows(rows, n());
  }
};

/// A basis where group i is x_{free[i]} times a monomial in the pivot slots.
struct SpecialPiBasis {
  PiBasis base;
  std::vector<std::size_t> pivot_indices;
  std::vector<std::size_t> free_indices;
};

struct Transition {
  QMatrix matrix;   // row i: coefficients of target group i over the source groups
  QMatrix inverse;
};

namespace detail {
inline const DimSystem& require_dims(std::span<const DimVector> dims) {
  if (dims.empty()) throw Error(ErrorKind::EmptyList, "no dimensions given");
  for (const auto& d : dims)
    if (!(d.system() == dims.front().system())) throw Error(ErrorKind::SystemMismatch, "dimensions from different systems");
  return dims.front().system();
}
}  // namespace detail

/// Canonical basis: the integer-primitive RREF kernel of the dimension matrix.
inline PiBasis pi_basis(std::span<const DimVector> dims) {
  const DimSystem& system = detail::require_dims(dims);
  PiBasis out{std::vector<DimVector>(dims.begin(), dims.end()), {}};
  for (auto& v : kernel_basis(dimension_matrix(system, dims))) out.groups.emplace_back(std::move(v));
  return out;
}

inline SpecialPiBasis special_basis(std::span<const DimVector> dims) {
  const DimSystem& system = detail::require_dims(dims);
  const auto r = rref(dimension_matrix(system, dims));
  SpecialPiBasis out;
  out.base.dims.assign(dims.begin(), dims.end());
  out.pivot_indices = r.pivot_cols;
  std::vector<bool> is_pivot(dims.size(), false);
  for (auto p : r.pivot_cols) is_pivot[p] = true;
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (!is_pivot[i]) out.free_indices.push_back(i);
  // The unscaled free-variable kernel vectors already have coefficient 1 at
  // their own free slot and 0 at every other free slot.
  for (auto& v : kernel_vectors_unscaled(r)) out.base.groups.emplace_back(std::move(v));
  return out;
}

inline bool is_pi_basis(std::span<const Fclcf> candidate, std::span<const DimVector> dims) {
  const DimSystem& system = detail::require_dims(dims);
  const QMatrix a = dimension_matrix(system, dims);
  const std::size_t expected = dims.size() - rank(a);
  if (candidate.size() != expected) return false;
  std::vector<RVector> rows;
  for (const auto& g : candidate) {
    if (g.arity() != dims.size()) return false;
    for (const auto& e : a * g.coefficients())
      if (e != 0) return false;
    rows.push_back(g.coefficients());
  }
  return rank(QMatrix::from_rows(rows, dims.size())) == candidate.size();
}

inline bool is_pi_basis(const PiBasis& b) { return !b.dims.empty() && is_pi_basis(b.groups, b.dims); }

/// Transition from `psi` to `pi`: pi_i = prod_j psi_j^{matrix(i,j)}.
inline Transition transition(const PiBasis& psi, const PiBasis& pi) {
  if (!(psi.dims == pi.dims)) throw Error(ErrorKind::NotABasis, "bases are over different dimension lists");
  if (!is_pi_basis(psi) || !is_pi_basis(pi)) throw Error(ErrorKind::NotABasis, "not a basis of the pi-group space");
  const std::size_t r = psi.r();
  const QMatrix psi_t = psi.coefficient_matrix().transpose();  // n x r
  QMatrix m(r, r);
  for (std::size_t i = 0; i < r; ++i) {
    auto row = solve(psi_t, pi.groups[i].coefficients());
    if (!row) throw Error(ErrorKind::NotABasis, "group is outside the span of the source basis");
    for (std::size_t j = 0; j < r; ++j) m(i, j) = (*row)[j];
  }
  auto inv = invert(m);
  if (!inv) throw Error(ErrorKind::NotABasis, "transition matrix is singular");
  return {std::move(m), std::move(*inv)};
}

/// New basis whose group i is prod_j basis.groups[j]^{change(i,j)}.
inline PiBasis change_basis(const PiBasis& basis, const QMatrix& change) {
  if (change.cols() != basis.r()) throw Error(ErrorKind::ArityMismatch, "change-of-basis matrix has wrong width");
  const QMatrix rows = change * basis.coefficient_matrix();
  PiBasis out{basis.dims, {}};
  for (std::size_t i = 0; i < rows.rows(); ++i) out.groups.emplace_back(rows.row(i));
  return out;
}

}  // namespace piforge
