#pragma once

// Problem-spec files:
//   { "system": [...], "variables": { "<name>": "<dim-expr>", ... },
//     "relation": "<relation-expr>", "registry": "<path>" }
// "relation" and "registry" are optional. The registry path is resolved
// relative to the spec file.

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "piforge/core.hpp"
#include "piforge/dimexpr.hpp"
#include "piforge/error.hpp"
#include "piforge/relation.hpp"
#include "piforge/units.hpp"

namespace piforge {

struct ProblemSpec {
  DimSystem system;
  std::vector<std::string> names;
  std::vector<DimVector> dims;
  UnitRegistry registry;
  std::string relation_text;
  dsl::NodePtr relation;  // null when the spec has no relation

  dsl::TypeEnv env() const {
    dsl::TypeEnv e;
    for (std::size_t i = 0; i < names.size(); ++i) e.emplace(names[i], dims[i]);
    return e;
  }

  dsl::Bindings bind(std::span<const Quantity> xs) const {
    dsl::Bindings b;
    for (std::size_t i = 0; i < names.size(); ++i) b.emplace(names[i], xs[i]);
    return b;
  }

  /// Magnitude-1 quantity of each variable's dimension in the coherent
  /// reference system. Always a consistent list.
  std::vector<Quantity> coherent_reference() const {
    std::vector<Quantity> out;
    for (const auto& d : dims) out.emplace_back(0.0, d);
    return out;
  }

  /// Parses the relation (if any) and checks that it is a well-typed predicate.
  void check_relation() const {
    if (!relation) throw Error(ErrorKind::SpecError, "spec has no relation");
    const auto t = dsl::typecheck(relation, env(), system);
    if (!std::holds_alternative<dsl::BoolType>(t))
      throw dsl::DimensionError(relation_text, dsl::describe(t), "bool");
  }
};

inline ProblemSpec problem_from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir,
                                     const std::optional<std::string>& registry_override = std::nullopt) {
  if (!j.is_object() || !j.contains("system") || !j.contains("variables"))
    throw Error(ErrorKind::SpecError, "spec needs \"system\" and \"variables\"");
  DimSystem system(j.at("system").get<std::vector<std::string>>());

  std::optional<std::string> registry_path = registry_override;
  if (!registry_path && j.contains("registry")) {
    std::filesystem::path p = j.at("registry").get<std::string>();
    registry_path = (p.is_absolute() ? p : base_dir / p).string();
  }
  UnitRegistry registry = registry_path ? UnitRegistry::load(*registry_path) : UnitRegistry::coherent(system);
  if (!(registry.system() == system)) throw Error(ErrorKind::SpecError, "registry uses a different dimension system");

  ProblemSpec spec{system, {}, {}, std::move(registry), {}, nullptr};
  for (const auto& [name, dim] : j.at("variables").items()) {
    if (dsl::detail::is_keyword(name)) throw Error(ErrorKind::SpecError, "variable name '" + name + "' is reserved");
    spec.names.push_back(name);
    spec.dims.push_back(parse_dimension(dim.get<std::string>(), system));
  }
  if (spec.names.empty()) throw Error(ErrorKind::SpecError, "spec declares no variables");
  if (j.contains("relation")) {
    spec.relation_text = j.at("relation").get<std::string>();
    spec.relation = dsl::parse(spec.relation_text, spec.registry);
  }
  return spec;
}

inline ProblemSpec load_problem(const std::string& path, const std::optional<std::string>& registry_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SpecError, "cannot open spec '" + path + "'");
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SpecError, "spec '" + path + "': " + e.what());
  }
  return problem_from_json(j, std::filesystem::path(path).parent_path(), registry_override);
}

/// Reads variable values, either "name=<quantity>; name=<quantity>" or the
/// path of a JSON object {"name": "<quantity>"}. Returns them in spec order.
inline std::vector<Quantity> parse_bindings(const std::string& text, const ProblemSpec& spec) {
  std::vector<std::pair<std::string, std::string>> pairs;
  if (text.size() > 5 && text.ends_with(".json") && std::filesystem::exists(text)) {
    std::ifstream in(text);
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SpecError, "bindings '" + text + "': " + e.what());
    }
    for (const auto& [k, v] : j.items()) pairs.emplace_back(k, v.get<std::string>());
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::SyntaxError, "binding '" + item + "' needs '='");
      std::string name = item.substr(0, eq);
      name.erase(0, name.find_first_not_of(" \t"));
      name.erase(name.find_last_not_of(" \t") + 1);
      pairs.emplace_back(name, item.substr(eq + 1));
    }
  }
  std::vector<std::optional<Quantity>> slots(spec.names.size());
  for (const auto& [name, qty] : pairs) {
    auto it = std::find(spec.names.begin(), spec.names.end(), name);
    if (it == spec.names.end()) throw Error(ErrorKind::UnknownVariable, "'" + name + "' is not a spec variable");
    const auto idx = static_cast<std::size_t>(it - spec.names.begin());
    Quantity q = parse_quantity(qty, spec.registry);
    if (!(q.dim() == spec.dims[idx]))
      throw Error(ErrorKind::DimensionMismatch, "'" + name + "' has dimension " + q.dim().to_string() + ", expected " +
                                                    spec.dims[idx].to_string());
    slots[idx] = std::move(q);
  }
  std::vector<Quantity> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) throw Error(ErrorKind::UnknownVariable, "no value for '" + spec.names[i] + "'");
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

/// "<magnitude> <dim>" in the coherent system; parses back with
/// parse_quantity against a coherent registry.
inline std::string format_quantity(const Quantity& q) {
  std::string s = format_decimal(q.magnitude());
  if (!q.dim().is_zero()) s += " " + q.dim().to_string();
  return s;
}

}  // namespace piforge
