#pragma once

// Randomized dimensional-invariance testing: rescale the fundamental units,
// compare the truth value of a relation before and after, and report the
// first counterexample.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "piforge/core.hpp"
#include "piforge/error.hpp"
#include "piforge/exactlin.hpp"
#include "piforge/problem.hpp"
#include "piforge/relation.hpp"

namespace piforge {

/// One positive factor per fundamental dimension, stored as logs.
struct Rescaling {
  DimSystem system;
  std::vector<double> log_factors;

  static Rescaling identity(const DimSystem& system) { return {system, std::vector<double>(system.size(), 0.0)}; }

  static Rescaling from_factors(const DimSystem& system, std::span<const double> factors) {
    if (factors.size() != system.size()) throw Error(ErrorKind::ArityMismatch, "one factor per fundamental required");
    Rescaling r{system, {}};
    for (double f : factors) {
      if (!(f > 0) || !std::isfinite(f)) throw Error(ErrorKind::NonPositive, "rescaling factors must be positive");
      r.log_factors.push_back(std::log(f));
    }
    return r;
  }

  /// Multiplier applied to a quantity of dimension d.
  double log_multiplier(const DimVector& d) const {
    double s = 0.0;
    for (std::size_t j = 0; j < log_factors.size(); ++j)
      if (d[j] != 0) s += to_double(d[j]) * log_factors[j];
    return s;
  }
};

inline std::vector<Quantity> rescale(std::span<const Quantity> xs, const Rescaling& r) {
  std::vector<Quantity> out;
  out.reserve(xs.size());
  for (const auto& x : xs) {
    if (!(x.dim().system() == r.system)) throw Error(ErrorKind::SystemMismatch, "rescaling from a different system");
    out.emplace_back(x.log_magnitude() + r.log_multiplier(x.dim()), x.dim());
  }
  return out;
}

/// Independent equivalence check: ys is a rescaling of xs iff the log-ratio
/// vector lies in the row space of the dimension matrix. The row space basis
/// comes from exact RREF; the projection is a real least-squares fit.
inline bool oracle_equivalent(std::span<const Quantity> xs, std::span<const Quantity> ys, double tol = kDefaultTolerance) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::DimensionMismatch, "lists differ in length");
  if (xs.empty()) return true;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!(xs[i].dim() == ys[i].dim())) throw Error(ErrorKind::DimensionMismatch, "slot " + std::to_string(i) + " differs");
  const std::size_t n = xs.size();
  const auto r = rref(dimension_matrix(xs.front().dim().system(), dims_of(xs)));
  Eigen::VectorXd delta(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) delta(static_cast<Eigen::Index>(i)) = ys[i].log_magnitude() - xs[i].log_magnitude();
  if (r.rank == 0) return delta.norm() <= tol;
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r.rank));
  for (std::size_t k = 0; k < r.rank; ++k)
    for (std::size_t i = 0; i < n; ++i)
      basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = to_double(r.reduced(k, i));
  const Eigen::VectorXd coeffs = basis.colPivHouseholderQr().solve(delta);
  return (delta - basis * coeffs).norm() <= tol;
}

struct Counterexample {
  std::size_t trial = 0;
  std::vector<Quantity> bindings;
  Rescaling rescaling;
  bool before = false;
  bool after = false;
};

struct InvarianceReport {
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::uint64_t seed = 0;
  std::optional<Counterexample> counterexample;
};

struct FuzzOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  double tol = kDefaultTolerance;
  unsigned threads = 1;
  int shrink_rounds = 20;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Deterministic per-trial stream; independent of execution order.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial) : gen_(splitmix64(seed ^ splitmix64(trial))) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double log_uniform(double lo, double hi) {
    const double a = std::log(lo), b = std::log(hi);
    return a + (b - a) * uniform();
  }

 private:
  std::mt19937_64 gen_;
};

/// For a top-level equation "v = expr" (or "expr = v") with v absent from
/// expr, returns v's slot and the other side.
inline std::optional<std::pair<std::size_t, dsl::NodePtr>> seedable_equation(const ProblemSpec& spec) {
  const auto& root = spec.relation;
  if (!root || root->op != dsl::Op::Cmp || root->cmp != dsl::Cmp::Eq) return std::nullopt;
  for (const auto& [var, other] : {std::pair{root->lhs, root->rhs}, std::pair{root->rhs, root->lhs}}) {
    if (var->op != dsl::Op::Var) continue;
    std::set<std::string> used;
    dsl::collect_variables(other, used);
    if (used.count(var->name)) continue;
    auto it = std::find(spec.names.begin(), spec.names.end(), var->name);
    if (it != spec.names.end()) return std::pair{static_cast<std::size_t>(it - spec.names.begin()), other};
  }
  return std::nullopt;
}

struct TrialOutcome {
  std::vector<Quantity> bindings;
  Rescaling rescaling;
  bool before = false;
  bool after = false;
};

inline bool holds(const ProblemSpec& spec, std::span<const Quantity> xs, double tol) {
  return dsl::evaluate_predicate(spec.relation, spec.bind(xs), spec.system, {tol});
}

inline TrialOutcome run_trial(const ProblemSpec& spec, std::uint64_t seed, std::size_t trial, double tol,
                              const std::optional<std::pair<std::size_t, dsl::NodePtr>>& seedable) {
  TrialRng rng(seed, trial);
  std::vector<Quantity> xs;
  for (const auto& d : spec.dims) xs.emplace_back(rng.log_uniform(1e-3, 1e3), d);
  std::vector<double> factors;
  for (std::size_t j = 0; j < spec.system.size(); ++j) factors.push_back(rng.log_uniform(1e-2, 1e2));
  Rescaling r{spec.system, std::move(factors)};

  // Even trials sit on the relation's solution set when it is an explicit
  // equation; otherwise random points almost never satisfy an equality.
  if (seedable && trial % 2 == 0) {
    const auto v = dsl::evaluate(seedable->second, spec.bind(xs), spec.system, {tol});
    const auto& s = std::get<dsl::Scalar>(v);
    if (!s.is_undefined() && s.sign > 0 && std::isfinite(s.log_abs)) xs[seedable->first] = Quantity(s.log_abs, s.dim);
  }
  TrialOutcome out{xs, r, holds(spec, xs, tol), false};
  out.after = holds(spec, rescale(xs, r), tol);
  return out;
}

}  // namespace detail

/// Runs `trials` independent trials. Each draws log-uniform bindings in
/// [1e-3, 1e3] and rescaling factors in [1e-2, 1e2]; a trial passes when the
/// relation has the same truth value before and after rescaling. The lowest
/// failing trial is reported, with its rescaling shrunk toward 1.
///
/// A failure proves the relation is not dimensionally invariant; passing
/// every trial is evidence, not proof.
inline InvarianceReport fuzz_invariance(const ProblemSpec& spec, const FuzzOptions& opts = {}) {
  if (opts.trials < 1) throw Error(ErrorKind::SpecError, "need at least one trial");
  try {
    spec.check_relation();
  } catch (const Error& e) {
    throw Error(ErrorKind::SpecError, e.what());
  }
  const auto seedable = detail::seedable_equation(spec);

  std::vector<char> pass(opts.trials, 0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const auto o = detail::run_trial(spec, opts.seed, t, opts.tol, seedable);
      pass[t] = o.before == o.after;
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(opts.trials)));
  if (threads == 1) {
    work(0, opts.trials);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (opts.trials + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      const std::size_t b = k * chunk, e = std::min(opts.trials, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
  }

  InvarianceReport report{opts.trials, static_cast<std::size_t>(std::count(pass.begin(), pass.end(), 1)), opts.seed, {}};
  auto first_fail = std::find(pass.begin(), pass.end(), 0);
  if (first_fail == pass.end()) return report;

  const auto trial = static_cast<std::size_t>(first_fail - pass.begin());
  auto o = detail::run_trial(spec, opts.seed, trial, opts.tol, seedable);
  // Move each factor toward 1 while the violation persists: first try 1
  // itself, then halve its log.
  for (int round = 0; round < opts.shrink_rounds; ++round) {
    bool changed = false;
    for (std::size_t j = 0; j < o.rescaling.log_factors.size(); ++j) {
      for (double scale : {0.0, 0.5}) {
        if (o.rescaling.log_factors[j] == 0.0) break;
        Rescaling candidate = o.rescaling;
        candidate.log_factors[j] *= scale;
        const bool after = detail::holds(spec, rescale(o.bindings, candidate), opts.tol);
        if (after != o.before) {
          o.rescaling = std::move(candidate);
          o.after = after;
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
  report.counterexample = Counterexample{trial, std::move(o.bindings), std::move(o.rescaling), o.before, o.after};
  return report;
}

inline nlohmann::ordered_json report_json(const InvarianceReport& r, const ProblemSpec& spec) {
  nlohmann::ordered_json j;
  j["trials"] = r.trials;
  j["passed"] = r.passed;
  j["seed"] = r.seed;
  if (r.counterexample) {
    const auto& c = *r.counterexample;
    nlohmann::ordered_json ce;
    ce["trial"] = c.trial;
    nlohmann::ordered_json b = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < spec.names.size(); ++i) b[spec.names[i]] = format_quantity(c.bindings[i]);
    ce["bindings"] = b;
    nlohmann::ordered_json f = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < spec.system.size(); ++k)
      f[spec.system.name(k)] = format_decimal(std::exp(c.rescaling.log_factors[k]));
    ce["factors"] = f;
    ce["before"] = c.before;
    ce["after"] = c.after;
    j["counterexample"] = ce;
    j["verdict"] = "not dimensionally invariant";
  } else {
    j["counterexample"] = nullptr;
    j["verdict"] = "no violation found (evidence, not proof)";
  }
  return j;
}

}  // namespace piforge
