#include <cmath>

#include "doctest.h"
#include "stopkit/discretize.hpp"
#include "stopkit/exact_dp.hpp"
#include "stopkit/gen.hpp"
#include "stopkit/model.hpp"
#include "stopkit/preprocess.hpp"
#include "stopkit/rng.hpp"

using namespace stopkit;

TEST_SUITE("discretize") {

TEST_CASE("roundDownToPower snaps boundaries and rejects nonpositive input") {
  const double eps = 0.2;
  CHECK(roundDownToPower(1.0, eps).exponent == 0);
  CHECK_FALSE(roundDownToPower(1.0, eps).isZero);

  double p3 = std::pow(1.2, 3);
  CHECK(roundDownToPower(p3, eps).exponent == 3);
  CHECK(roundDownToPower(p3 * 1.01, eps).exponent == 3);
  CHECK(roundDownToPower(p3 * 0.99, eps).exponent == 2);
  // Representation noise just under a power still lands on it.
  CHECK(roundDownToPower(p3 * (1.0 - 1e-14), eps).exponent == 3);

  CHECK(roundDownToPower(0.5, eps).exponent < 0);
  CHECK(powerValue(roundDownToPower(0.07, eps).exponent, eps) <= 0.07 + 1e-15);
  CHECK_THROWS_AS(roundDownToPower(0.0, eps), ValidationError);
  CHECK_THROWS_AS(roundDownToPower(-1.0, eps), ValidationError);
}

TEST_CASE("value rounding lands on the grid and never raises values") {
  const double eps = 0.2;
  Instance inst = gen::constSupport(5, 8, 3);
  Instance out = roundValuesToPowers(inst, eps);
  for (int i = 0; i < out.size(); ++i) {
    for (const auto& a : out.variables[static_cast<std::size_t>(i)].atoms) {
      if (a.value == 0.0) continue;
      PowerKey k = roundDownToPower(a.value, eps);
      REQUIRE(std::abs(powerValue(k.exponent, eps) - a.value) <= 1e-12 * a.value);
    }
    CHECK(out.variables[static_cast<std::size_t>(i)].maxValue() <=
          inst.variables[static_cast<std::size_t>(i)].maxValue() + 1e-15);
  }
  CHECK(validate(out).ok());
}

TEST_CASE("rounding keeps at least a 1/(1+eps) fraction of the value") {
  SplitMix64 seeds(41);
  for (double eps : {0.1, 0.3}) {
    for (int c = 0; c < 10; ++c) {
      Instance inst = gen::twoPointUniform(5, seeds.next());
      double base = solveExact(inst).value();
      double vr = solveExact(roundValuesToPowers(inst, eps)).value();
      double pr = solveExact(roundProbsToPowers(inst, eps)).value();
      REQUIRE(vr >= base / (1.0 + eps) - 1e-9);
      REQUIRE(vr <= base + 1e-9);
      REQUIRE(pr >= base / (1.0 + eps) - 1e-9);
      REQUIRE(pr <= base + 1e-9);
    }
  }
}

TEST_CASE("probability rounding sends the deficit to the zero atom") {
  Instance inst;
  inst.variables.push_back(makeDistribution({{1.0, 0.37}}, true));
  Instance out = roundProbsToPowers(inst, 0.2);
  REQUIRE(validate(out).ok());
  const auto& atoms = out.variables[0].atoms;
  REQUIRE(atoms.size() == 2);
  CHECK(atoms[1].prob <= 0.37 + 1e-15);
  double total = atoms[0].prob + atoms[1].prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("discretizeInstance is idempotent") {
  const double eps = 0.25;
  Instance raw = gen::twoPointUniform(6, 17, 0.3, 2.0, 0.2, 0.8);
  Instance norm = zeroSmallValues(normalize(raw), eps);
  DiscretizeResult once = discretizeInstance(norm, eps);
  DiscretizeResult twice = discretizeInstance(once.instance, eps);
  CHECK(twice.instance.variables == once.instance.variables);
  CHECK(twice.keys == once.keys);
}

TEST_CASE("high atoms keep their exact value and the vmax marker") {
  const double eps = 0.25;  // high region starts at 16
  Instance inst;
  inst.variables.push_back(makeDistribution({{0.9, 0.5}}, true));
  inst.variables.push_back(makeDistribution({{20.0, 0.05}}, true));
  DiscretizeResult d = discretizeInstance(inst, eps);
  CHECK(d.instance.variables[1].maxValue() == 20.0);
  bool sawVmax = false;
  for (const auto& a : d.keys[1].atoms) sawVmax = sawVmax || a.isVmax;
  CHECK(sawVmax);
  // The ordinary atom rounds down onto the grid instead.
  CHECK(d.instance.variables[0].maxValue() <= 0.9);
  for (const auto& a : d.keys[0].atoms) CHECK_FALSE(a.isVmax);
}

TEST_CASE("group keys separate exactly the distinct discretized laws") {
  const double eps = 0.25;
  Instance inst;
  DiscreteDistribution a = makeDistribution({{0.8, 0.5}}, true);
  DiscreteDistribution b = makeDistribution({{1.1, 0.4}}, true);
  inst.variables = {a, b, a};
  DiscretizeResult d = discretizeInstance(inst, eps);
  REQUIRE(d.keys.size() == 3);
  CHECK(d.keys[0] == d.keys[2]);
  CHECK_FALSE(d.keys[0] == d.keys[1]);
  CHECK_FALSE(d.keys[0].toString().empty());
}

TEST_CASE("discretizeInstance rejects unpreprocessed atoms") {
  // A value below eps classifies as preprocessing work.
  Instance small;
  small.variables.push_back(makeDistribution({{0.05, 0.5}, {0.8, 0.3}}, true));
  CHECK_THROWS_AS(discretizeInstance(small, 0.3), PipelineError);

  // A heavy atom above 1/eps^2 is forbidden on a normalized instance.
  Instance forbidden;
  forbidden.variables.push_back(makeDistribution({{20.0, 0.5}}, true));
  CHECK_THROWS_AS(discretizeInstance(forbidden, 0.3), PipelineError);
}

TEST_CASE("countGroups stays within the combinatorial ceiling") {
  const double eps = 0.25;
  Instance raw = gen::constSupport(8, 23, 3);
  Instance norm = normalize(raw);
  Instance pre = zeroSmallValues(norm, eps);
  pre = zeroSmallMeans(pre, eps, 3);
  DiscretizeResult d = discretizeInstance(pre, eps);
  GroupCountReport report = countGroups(d.instance, eps, 3);
  CHECK(report.distinctGroups >= 1);
  CHECK(report.withinBound);
  CHECK(report.pairCount == static_cast<std::int64_t>(report.valueKeys) * report.probKeys);
}

}  // TEST_SUITE
