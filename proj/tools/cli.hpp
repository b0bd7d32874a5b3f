#pragma once

// Command-line front end. Exit codes: 0 success/pass, 1 domain negative
// (inconsistent, violation, not equivalent, ill-typed), 2 usage or input
// errors.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "piforge/piforge.hpp"

namespace piforge::cli {

struct CliConfig {
  std::string subcommand;
  std::string spec_path;
  std::optional<std::string> registry_path;
  std::vector<std::string> positional;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double tol = kDefaultTolerance;
  bool json = false;
};

namespace detail {

inline FactorList named(const std::vector<std::string>& names, const Fclcf& p) {
  FactorList f;
  for (std::size_t i = 0; i < names.size(); ++i) f.emplace_back(names[i], p[i]);
  return f;
}

inline nlohmann::ordered_json exponent_strings(const Fclcf& p) {
  auto a = nlohmann::ordered_json::array();
  for (const auto& c : p.coefficients()) a.push_back(to_string(c));
  return a;
}

inline std::string join(const std::vector<std::string>& xs, const char* sep = " ") {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += sep;
    out += x;
  }
  return out;
}

inline std::vector<std::string> pick(const std::vector<std::string>& names, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(names[i]);
  return out;
}

inline std::optional<std::string> registry_default(const CliConfig& cfg) {
  if (cfg.registry_path) return cfg.registry_path;
  if (const char* env = std::getenv("PIFORGE_REGISTRY"); env && *env) return std::string(env);
  return std::nullopt;
}

inline ProblemSpec load_spec(const CliConfig& cfg) {
  if (cfg.spec_path.empty()) throw Error(ErrorKind::SpecError, "--spec is required");
  // An explicit --registry overrides the spec's own; the environment default
  // only applies when the spec names none.
  return load_problem(cfg.spec_path, cfg.registry_path);
}

}  // namespace detail

inline int cmd_pi(const CliConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = detail::load_spec(cfg);
  const PiBasis canon = pi_basis(spec.dims);
  const SpecialPiBasis sb = special_basis(spec.dims);
  const std::size_t n = canon.n(), r = canon.r(), m = n - r;
  if (cfg.json) {
    nlohmann::ordered_json j;
    auto vars = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < n; ++i) vars[spec.names[i]] = spec.dims[i].to_string();
    j["variables"] = vars;
    j["n"] = n;
    j["m"] = m;
    j["r"] = r;
    auto c = nlohmann::ordered_json::array();
    for (const auto& g : canon.groups) c.push_back(detail::exponent_strings(g));
    j["canonical"] = c;
    nlohmann::ordered_json s;
    s["pivots"] = detail::pick(spec.names, sb.pivot_indices);
    s["free"] = detail::pick(spec.names, sb.free_indices);
    auto sg = nlohmann::ordered_json::array();
    for (const auto& g : sb.base.groups) sg.push_back(detail::exponent_strings(g));
    s["groups"] = sg;
    j["special"] = s;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "variables:";
  for (std::size_t i = 0; i < n; ++i) out << " " << spec.names[i] << " [" << spec.dims[i].to_string() << "]";
  out << "\n";
  out << "n = " << n << "\nm = " << m << "\n";
  if (r == 0) {
    out << "r = 0: relation is determined up to a dimensionless constant set\n";
    return 0;
  }
  out << "r = " << r << "\n";
  out << "canonical basis:\n";
  for (std::size_t i = 0; i < r; ++i) {
    out << "  pi" << i + 1 << " = " << format_factors(detail::named(spec.names, canon.groups[i])) << "  [";
    for (std::size_t k = 0; k < n; ++k) out << (k ? ", " : "") << to_string(canon.groups[i][k]);
    out << "]\n";
  }
  out << "special basis (pivots: " << detail::join(detail::pick(spec.names, sb.pivot_indices), ", ")
      << "; free: " << detail::join(detail::pick(spec.names, sb.free_indices), ", ") << "):\n";
  for (std::size_t i = 0; i < r; ++i)
    out << "  psi" << i + 1 << " = " << format_factors(detail::named(spec.names, sb.base.groups[i])) << "\n";
  return 0;
}

inline int cmd_consistent(const CliConfig& cfg, std::ostream& out) {
  const auto path = detail::registry_default(cfg);
  if (!path) throw Error(ErrorKind::SpecError, "a registry is required (--registry or PIFORGE_REGISTRY)");
  if (cfg.positional.empty()) throw Error(ErrorKind::EmptyList, "no units given");
  const UnitRegistry reg = UnitRegistry::load(*path);
  std::vector<Quantity> units;
  for (const auto& u : cfg.positional) units.push_back(reg.unit_expression(u));
  const auto report = is_consistent(units, cfg.tol);
  if (cfg.json) {
    nlohmann::ordered_json j;
    j["units"] = cfg.positional;
    j["consistent"] = report.consistent;
    if (report.witness) {
      nlohmann::ordered_json w;
      auto combo = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < units.size(); ++i)
        if (report.witness->combination[i] != 0) combo[cfg.positional[i]] = to_string(report.witness->combination[i]);
      w["combination"] = combo;
      w["factor"] = format_decimal(report.witness->clash_factor);
      j["clash"] = w;
    } else {
      j["clash"] = nullptr;
    }
    out << j.dump(2) << "\n";
  } else if (report.consistent) {
    out << "consistent: " << detail::join(cfg.positional) << "\n";
    std::vector<std::string> basis;
    for (auto i : independent_indices(dims_of(units), reg.system())) basis.push_back(cfg.positional[i]);
    out << "fundamental basis: " << detail::join(basis) << "\n";
  } else {
    out << "inconsistent: " << detail::join(cfg.positional) << "\n";
    out << "clash: " << format_factors(detail::named(cfg.positional, report.witness->combination)) << " = "
        << format_decimal(report.witness->clash_factor) << "\n";
  }
  return report.consistent ? 0 : 1;
}

inline int cmd_verify(const CliConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = detail::load_spec(cfg);
  FuzzOptions opts;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  opts.tol = cfg.tol;
  const auto report = fuzz_invariance(spec, opts);
  const auto j = report_json(report, spec);
  if (cfg.json) {
    out << j.dump(2) << "\n";
  } else {
    out << "relation: " << dsl::print(spec.relation) << "\n";
    out << "trials: " << report.trials << "  passed: " << report.passed << "  seed: " << report.seed << "\n";
    out << "result: " << j["verdict"].get<std::string>() << "\n";
    if (report.counterexample) out << "counterexample: " << j["counterexample"].dump(2) << "\n";
  }
  return report.counterexample ? 1 : 0;
}

inline int cmd_equiv(const CliConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = detail::load_spec(cfg);
  if (cfg.positional.size() != 2) throw Error(ErrorKind::SpecError, "equiv needs two binding sets");
  const auto xs = parse_bindings(cfg.positional[0], spec);
  const auto ys = parse_bindings(cfg.positional[1], spec);
  const PiBasis basis = pi_basis(spec.dims);
  const auto v = equivalent(basis, xs, ys, cfg.tol);
  if (cfg.json) {
    nlohmann::ordered_json j;
    j["equivalent"] = v.equivalent;
    j["reason"] = v.reason == EquivalenceReason::Equivalent   ? "Equivalent"
                  : v.reason == EquivalenceReason::PiMismatch ? "PiMismatch"
                                                              : "DimMismatch";
    if (!v.equivalent) j["index"] = v.index;
    out << j.dump(2) << "\n";
  } else if (v.equivalent) {
    out << "equivalent\n";
  } else {
    const auto px = pi_values(basis, xs), py = pi_values(basis, ys);
    out << "not equivalent: pi" << v.index + 1 << " = "
        << format_factors(detail::named(spec.names, basis.groups[v.index])) << " differs ("
        << format_decimal(px.value(v.index)) << " vs " << format_decimal(py.value(v.index)) << ")\n";
  }
  return v.equivalent ? 0 : 1;
}

inline int cmd_nondim(const CliConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = detail::load_spec(cfg);
  if (cfg.positional.size() != 1) throw Error(ErrorKind::SpecError, "nondim needs one binding set");
  const auto xs = parse_bindings(cfg.positional[0], spec);
  const PiBasis canon = pi_basis(spec.dims);
  const SpecialPiBasis sb = special_basis(spec.dims);
  const auto ref = spec.coherent_reference();
  const auto pc = pi_values(canon, xs);
  const auto ps = pi_values(sb.base, xs);
  const auto rep = canonical_rep(sb, ref, xs, cfg.tol);
  std::optional<bool> holds;
  if (spec.relation) {
    spec.check_relation();
    holds = dsl::evaluate_predicate(spec.relation, spec.bind(xs), spec.system, {cfg.tol});
  }
  if (cfg.json) {
    nlohmann::ordered_json j;
    auto c = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < pc.size(); ++i) c.push_back(format_decimal(pc.value(i)));
    j["canonical_pi"] = c;
    auto s = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ps.size(); ++i) s.push_back(format_decimal(ps.value(i)));
    j["special_pi"] = s;
    auto rj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < rep.size(); ++i) rj[spec.names[i]] = format_quantity(rep[i]);
    j["representative"] = rj;
    if (holds) j["relation"] = *holds;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "canonical pi-values:\n";
  for (std::size_t i = 0; i < pc.size(); ++i)
    out << "  pi" << i + 1 << " = " << format_factors(detail::named(spec.names, canon.groups[i])) << " = "
        << format_decimal(pc.value(i)) << "\n";
  out << "special pi-values:\n";
  for (std::size_t i = 0; i < ps.size(); ++i)
    out << "  psi" << i + 1 << " = " << format_factors(detail::named(spec.names, sb.base.groups[i])) << " = "
        << format_decimal(ps.value(i)) << "\n";
  out << "canonical representative (reference: coherent units):\n";
  for (std::size_t i = 0; i < rep.size(); ++i) out << "  " << spec.names[i] << " = " << format_quantity(rep[i]) << "\n";
  if (holds) out << "relation: " << (*holds ? "true" : "false") << "\n";
  return 0;
}

inline int cmd_check(const CliConfig& cfg, std::ostream& out) {
  const ProblemSpec spec = detail::load_spec(cfg);
  try {
    spec.check_relation();
  } catch (const dsl::DimensionError& e) {
    out << "ill-typed: " << e.what() << "\n";
    return 1;
  }
  out << "ok: " << dsl::print(spec.relation) << "\n";
  return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact dimensional analysis: pi-groups, consistency, invariance fuzzing"};
  app.require_subcommand(1);
  CliConfig cfg;
  std::optional<std::string> registry;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", cfg.spec_path, "problem spec JSON");
    sub->add_option("--registry", registry, "unit registry JSON");
    sub->add_option("--tol", cfg.tol, "log/relative tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--json", cfg.json, "emit JSON");
  };
  auto* pi = app.add_subcommand("pi", "list n, m, r and the canonical and special pi-bases");
  auto* consistent = app.add_subcommand("consistent", "check a list of units for clashes");
  auto* verify = app.add_subcommand("verify", "fuzz a relation for dimensional invariance");
  auto* equiv = app.add_subcommand("equiv", "decide whether two binding sets are rescalings of each other");
  auto* nondim = app.add_subcommand("nondim", "pi-values and canonical representative of a binding set");
  auto* check = app.add_subcommand("check", "type-check the relation of a spec");
  for (auto* s : {pi, consistent, verify, equiv, nondim, check}) add_common(s);
  consistent->add_option("units", cfg.positional, "unit names or unit expressions");
  verify->add_option("--trials", cfg.trials, "number of trials")->check(CLI::PositiveNumber);
  verify->add_option("--seed", cfg.seed, "64-bit seed");
  equiv->add_option("bindings", cfg.positional, "two binding sets: 'x=1 m; t=2 s' or a JSON file")->expected(2);
  nondim->add_option("bindings", cfg.positional, "binding set: 'x=1 m; t=2 s' or a JSON file")->expected(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  cfg.registry_path = registry;

  try {
    if (pi->parsed()) return cmd_pi(cfg, out);
    if (consistent->parsed()) return cmd_consistent(cfg, out);
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (equiv->parsed()) return cmd_equiv(cfg, out);
    if (nondim->parsed()) return cmd_nondim(cfg, out);
    if (check->parsed()) return cmd_check(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace piforge::cli
