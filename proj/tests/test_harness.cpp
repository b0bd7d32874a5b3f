#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "piforge/dimexpr.hpp"
#include "piforge/harness.hpp"
#include "piforge/nondim.hpp"

using namespace piforge;

namespace {

const DimSystem& mlt() {
  static const DimSystem s({"M", "L", "T"});
  return s;
}

ProblemSpec fixture(const char* name) { return load_problem(std::string(PIFORGE_FIXTURES "/") + name); }

ProblemSpec spring_with(const std::string& relation) {
  nlohmann::ordered_json j = {{"system", {"M", "L", "T"}},
                              {"variables", {{"m", "M"}, {"k", "M*T^-2"}, {"t", "T"}, {"x", "L"}}},
                              {"relation", relation}};
  return problem_from_json(j, ".");
}

std::vector<Quantity> random_values(std::mt19937_64& rng, std::span<const DimVector> dims) {
  std::uniform_real_distribution<double> lg(-7, 7);
  std::vector<Quantity> out;
  for (const auto& d : dims) out.emplace_back(lg(rng), d);
  return out;
}

}  // namespace

TEST(Rescale, Examples) {
  const std::vector<Quantity> xs = {Quantity::from_magnitude(2, parse_dimension("M", mlt())),
                                    Quantity::from_magnitude(8, parse_dimension("M*T^-2", mlt())),
                                    Quantity::from_magnitude(3, parse_dimension("T", mlt()))};
  const double f[] = {1, 1, 2};
  const auto ys = rescale(xs, Rescaling::from_factors(mlt(), f));
  EXPECT_NEAR(ys[0].magnitude(), 2, 1e-14);
  EXPECT_NEAR(ys[1].magnitude(), 2, 1e-14);
  EXPECT_NEAR(ys[2].magnitude(), 6, 1e-14);
  const auto same = rescale(xs, Rescaling::identity(mlt()));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(same[i].log_magnitude(), xs[i].log_magnitude());
  const double bad[] = {1, 0, 2};
  EXPECT_THROW(Rescaling::from_factors(mlt(), bad), Error);
  EXPECT_THROW(Rescaling::from_factors(mlt(), std::span<const double>(f, 2)), Error);
}

TEST(OracleEquivalent, Examples) {
  const std::vector<Quantity> xs = {Quantity::from_magnitude(2, parse_dimension("M", mlt())),
                                    Quantity::from_magnitude(8, parse_dimension("M*T^-2", mlt())),
                                    Quantity::from_magnitude(3, parse_dimension("T", mlt()))};
  auto ys = xs;
  ys[2] = Quantity::from_magnitude(5, ys[2].dim());
  EXPECT_TRUE(oracle_equivalent(xs, xs));
  EXPECT_FALSE(oracle_equivalent(xs, ys));
  const double f[] = {7, 0.3, 0.01};
  EXPECT_TRUE(oracle_equivalent(xs, rescale(xs, Rescaling::from_factors(mlt(), f))));
  // Independent dimensions: every pair is equivalent.
  const std::vector<Quantity> a = {Quantity::from_magnitude(2, parse_dimension("M", mlt())),
                                   Quantity::from_magnitude(3, parse_dimension("L", mlt()))};
  const std::vector<Quantity> b = {Quantity::from_magnitude(11, parse_dimension("M", mlt())),
                                   Quantity::from_magnitude(0.5, parse_dimension("L", mlt()))};
  EXPECT_TRUE(oracle_equivalent(a, b));
}

TEST(OracleEquivalent, AgreesWithPiValues) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> e(-2, 2);
  std::uniform_real_distribution<double> lf(-4.6, 4.6), bump(-1, 1);
  int equiv = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<DimVector> dims;
    const std::size_t n = 2 + rng() % 5;
    for (std::size_t i = 0; i < n; ++i) dims.emplace_back(mlt(), RVector{e(rng), e(rng), e(rng)});
    const auto xs = random_values(rng, dims);
    auto ys = rescale(xs, Rescaling{mlt(), {lf(rng), lf(rng), lf(rng)}});
    if (trial % 2) {
      const std::size_t k = rng() % n;
      ys[k] = Quantity(ys[k].log_magnitude() + bump(rng), ys[k].dim());
    }
    const bool expected = oracle_equivalent(xs, ys);
    EXPECT_EQ(equivalent(pi_basis(dims), xs, ys).equivalent, expected);
    equiv += expected;
  }
  EXPECT_GT(equiv, 500);
}

TEST(Fuzz, DimensionallyConsistentRelationsPass) {
  for (const char* name : {"force.json", "light.json", "mass_spring.json", "electronics.json"}) {
    const auto r = fuzz_invariance(fixture(name), {.trials = 2000});
    EXPECT_EQ(r.passed, 2000u) << name;
    EXPECT_FALSE(r.counterexample) << name;
  }
}

TEST(Fuzz, HiddenConstantFailsEarly) {
  const auto spec = fixture("hidden_constant.json");
  const auto r = fuzz_invariance(spec, {.trials = 1000, .seed = 0});
  ASSERT_TRUE(r.counterexample);
  EXPECT_LT(r.counterexample->trial, 10u);
  EXPECT_LT(r.passed, 1000u);
  // The reported counterexample replays.
  const auto& c = *r.counterexample;
  EXPECT_NE(c.before, c.after);
  EXPECT_EQ(detail::holds(spec, c.bindings, kDefaultTolerance), c.before);
  EXPECT_EQ(detail::holds(spec, rescale(c.bindings, c.rescaling), kDefaultTolerance), c.after);
}

TEST(Fuzz, DeterministicAcrossRunsAndThreads) {
  const auto spec = fixture("hidden_constant.json");
  const auto a = fuzz_invariance(spec, {.trials = 500, .seed = 42});
  const auto b = fuzz_invariance(spec, {.trials = 500, .seed = 42});
  const auto c = fuzz_invariance(spec, {.trials = 500, .seed = 42, .threads = 4});
  EXPECT_EQ(report_json(a, spec).dump(), report_json(b, spec).dump());
  EXPECT_EQ(report_json(a, spec).dump(), report_json(c, spec).dump());
  const auto d = fuzz_invariance(spec, {.trials = 500, .seed = 43});
  EXPECT_NE(report_json(a, spec).dump(), report_json(d, spec).dump());
}

TEST(Fuzz, RejectsBadSpecs) {
  try {
    fuzz_invariance(fixture("ill_typed.json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpecError);
  }
  EXPECT_THROW(fuzz_invariance(fixture("independent.json")), Error);
  EXPECT_THROW(fuzz_invariance(fixture("force.json"), {.trials = 0}), Error);
}

TEST(Fuzz, ReportJson) {
  const auto spec = fixture("hidden_constant.json");
  const auto j = report_json(fuzz_invariance(spec, {.trials = 50}), spec);
  EXPECT_EQ(j["trials"], 50);
  ASSERT_TRUE(j["counterexample"].is_object());
  EXPECT_TRUE(j["counterexample"]["bindings"].contains("x"));
  EXPECT_TRUE(j["counterexample"]["factors"].contains("L"));
  const auto ok = fixture("force.json");
  const auto k = report_json(fuzz_invariance(ok, {.trials = 50}), ok);
  EXPECT_TRUE(k["counterexample"].is_null());
}

// Relations built only from the pi-group never fail.
TEST(Fuzz, PiGroupRelationsAreSound) {
  std::mt19937_64 rng(32);
  const char* cmps[] = {"<", ">", "<=", ">=", "=", "!="};
  for (int i = 0; i < 60; ++i) {
    const int p = 1 + static_cast<int>(rng() % 3);
    const std::string group = "(t^2*k/m)^(" + std::to_string(p) + "/2)";
    const std::string rel = group + " " + cmps[rng() % 6] + " " + std::to_string(1 + rng() % 20) + " or sin(" +
                            group + ") > 0.5";
    const auto r = fuzz_invariance(spring_with(rel), {.trials = 200, .seed = rng()});
    EXPECT_EQ(r.passed, 200u) << rel;
  }
}

TEST(Fuzz, MixedDimensionRelationFails) {
  const auto r = fuzz_invariance(spring_with("x < 2[L]*t^2*k/m"), {.trials = 200});
  EXPECT_TRUE(r.counterexample);
}
