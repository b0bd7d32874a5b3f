#pragma once

// Unit registries, the consistency test for unit lists, and expressing
// units in terms of a fundamental list.

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "piforge/core.hpp"
#include "piforge/dimexpr.hpp"
#include "piforge/error.hpp"
#include "piforge/exactlin.hpp"

namespace piforge {

/// Parses a decimal literal that must span the whole string.
inline double parse_decimal(std::string_view text) {
  std::string s(text);
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw Error(ErrorKind::SyntaxError, "bad decimal '" + s + "'");
  return v;
}

/// Named units, each a quantity expressed in the registry's coherent
/// reference system (the system in which every fundamental has magnitude 1).
class UnitRegistry {
 public:
  explicit UnitRegistry(DimSystem system) : system_(std::move(system)) {}

  /// Registry whose only units are the fundamental names, each of magnitude 1.
  static UnitRegistry coherent(const DimSystem& system) {
    UnitRegistry r(system);
    for (std::size_t i = 0; i < system.size(); ++i)
      r.add(system.name(i), Quantity(0.0, DimVector::unit(system, i)));
    return r;
  }

  static UnitRegistry from_json(const nlohmann::ordered_json& j) {
    if (!j.is_object() || !j.contains("system") || !j.contains("units"))
      throw Error(ErrorKind::SpecError, "registry needs \"system\" and \"units\"");
    DimSystem system(j.at("system").get<std::vector<std::string>>());
    UnitRegistry r(system);
    for (const auto& [name, entry] : j.at("units").items()) {
      if (!entry.is_object() || !entry.contains("magnitude") || !entry.contains("dim"))
        throw Error(ErrorKind::SpecError, "unit '" + name + "' needs \"magnitude\" and \"dim\"");
      const auto& mag = entry.at("magnitude");
      double m = mag.is_string() ? parse_decimal(mag.get<std::string>()) : mag.get<double>();
      r.add(name, Quantity::from_magnitude(m, parse_dimension(entry.at("dim").get<std::string>(), system)));
    }
    return r;
  }

  static UnitRegistry load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::SpecError, "cannot open registry '" + path + "'");
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SpecError, "registry '" + path + "': " + e.what());
    }
    return from_json(j);
  }

  void add(const std::string& name, Quantity q) {
    if (!(q.dim().system() == system_)) throw Error(ErrorKind::SystemMismatch, "unit '" + name + "' from another system");
    if (units_.count(name)) throw Error(ErrorKind::SpecError, "duplicate unit '" + name + "'");
    order_.push_back(name);
    units_.emplace(name, std::move(q));
  }

  const DimSystem& system() const noexcept { return system_; }
  const std::vector<std::string>& names() const noexcept { return order_; }
  bool contains(std::string_view name) const { return units_.count(std::string(name)) != 0; }

  const Quantity& get(std::string_view name) const {
    auto it = units_.find(std::string(name));
    if (it == units_.end()) throw Error(ErrorKind::UnknownUnit, "unknown unit '" + std::string(name) + "'");
    return it->second;
  }

  /// Folds a unit expression such as "kg*m/s^2" into one quantity.
  Quantity unit_expression(std::string_view text) const {
    Quantity out = Quantity::one(system_);
    for (const auto& [name, e] : parse_factors(text)) out *= get(name).pow(e);
    return out;
  }

 private:
  DimSystem system_;
  std::vector<std::string> order_;
  std::map<std::string, Quantity> units_;
};

/// "<decimal> <unit-expr>", e.g. "3 kg*m/s^2" or "2.5 knot". A bare number
/// is dimensionless.
inline Quantity parse_quantity(std::string_view text, const UnitRegistry& registry) {
  std::string s(text);
  const char* begin = s.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin) throw Error(ErrorKind::SyntaxError, "quantity must start with a decimal magnitude: '" + s + "'");
  if (errno == ERANGE) throw Error(ErrorKind::SyntaxError, "magnitude out of range: '" + s + "'");
  if (!(v > 0)) throw Error(ErrorKind::NonPositive, "quantities must be positive: '" + s + "'");
  std::string_view rest(end);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front()))) rest.remove_prefix(1);
  while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back()))) rest.remove_suffix(1);
  Quantity unit = rest.empty() ? Quantity::one(registry.system()) : registry.unit_expression(rest);
  return Quantity(std::log(v) + unit.log_magnitude(), unit.dim());
}

struct ClashWitness {
  Fclcf combination;    // maps the unit dimensions to the zero dimension
  double clash_factor;  // ... but the unit magnitudes to this value, != 1
};

struct ConsistencyReport {
  bool consistent = true;
  std::optional<ClashWitness> witness;
};

namespace detail {
inline const DimSystem& common_system(std::span<const Quantity> xs) {
  if (xs.empty()) throw Error(ErrorKind::EmptyList, "unit list is empty");
  const DimSystem& s = xs.front().dim().system();
  for (const auto& x : xs)
    if (!(x.dim().system() == s)) throw Error(ErrorKind::SystemMismatch, "units from different dimension systems");
  return s;
}
}  // namespace detail

/// A list is consistent when every product of powers of its members that is
/// dimensionless equals 1. Only the kernel basis of the dimension matrix
/// needs checking since the log magnitude of a combination is linear in
/// its exponents.
inline ConsistencyReport is_consistent(std::span<const Quantity> units, double tol = kDefaultTolerance) {
  const DimSystem& system = detail::common_system(units);
  const auto dims = dims_of(units);
  for (auto& v : kernel_basis(dimension_matrix(system, dims))) {
    Fclcf p(std::move(v));
    const double log = qty_combine(p, units, system).log_magnitude();
    if (std::abs(log) > tol) return {false, ClashWitness{std::move(p), std::exp(log)}};
  }
  return {};
}

/// Indices of the first maximal subfamily of `dims` with independent
/// dimensions (RREF pivot columns).
inline std::vector<std::size_t> independent_indices(std::span<const DimVector> dims, const DimSystem& system) {
  return rref(dimension_matrix(system, dims)).pivot_cols;
}

/// Members of a consistent list whose dimensions form a basis of the span of
/// all the list's dimensions; every member is a monomial in these.
inline std::vector<Quantity> fundamental_basis(std::span<const Quantity> units, double tol = kDefaultTolerance) {
  if (!is_consistent(units, tol).consistent) throw Error(ErrorKind::Inconsistent, "unit list is inconsistent");
  const auto dims = dims_of(units);
  std::vector<Quantity> out;
  for (auto i : independent_indices(dims, units.front().dim().system())) out.push_back(units[i]);
  return out;
}

/// Coefficients p_i with p_i(base) = targets[i]. The base dimensions must be
/// independent, which makes each p_i unique.
inline std::vector<Fclcf> express(std::span<const Quantity> base, std::span<const Quantity> targets,
                                  double tol = kDefaultTolerance) {
  if (targets.empty()) return {};
  const DimSystem& system = detail::common_system(targets);
  const QMatrix b = dimension_matrix(system, dims_of(base));
  if (rank(b) != base.size()) throw Error(ErrorKind::DependentBase, "base dimensions are linearly dependent");
  std::vector<Fclcf> out;
  for (const auto& t : targets) {
    auto x = solve(b, t.dim().exponents());
    if (!x) throw Error(ErrorKind::NoSolution, t.dim().to_string() + " is outside the span of the base dimensions");
    Fclcf p(std::move(*x));
    const double log = qty_combine(p, base, system).log_magnitude();
    if (std::abs(log - t.log_magnitude()) > tol)
      throw Error(ErrorKind::Inconsistent, "target magnitude is not reproduced by the base (clash)");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace piforge
