#include <cmath>

#include "doctest.h"
#include "stopkit/exact_dp.hpp"
#include "stopkit/gen.hpp"
#include "stopkit/model.hpp"
#include "stopkit/preprocess.hpp"

using namespace stopkit;

namespace {

Instance singleVar(std::vector<PointMass> atoms) {
  Instance inst;
  inst.variables.push_back(makeDistribution(std::move(atoms), true));
  return inst;
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("zeroSmallValues moves exactly the sub-eps atoms") {
  Instance inst = singleVar({{0.05, 0.5}, {0.5, 0.4}});
  TransformLog log;
  Instance out = zeroSmallValues(inst, 0.1, &log);
  REQUIRE(out.variables[0].atoms.size() == 2);
  CHECK(out.variables[0].atoms[0].value == 0.0);
  CHECK(out.variables[0].atoms[0].prob == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out.variables[0].atoms[1].value == 0.5);
  REQUIRE(log.steps.size() == 1);
  CHECK(log.steps[0].variablesTouched == 1);
  CHECK(log.steps[0].massMoved == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(log.steps[0].lossLowerFactor == doctest::Approx(1.0 - 1.5 * 0.1).epsilon(1e-12));
  CHECK(log.steps[0].gainUpperFactor == 1.0);
}

TEST_CASE("zeroSmallMeans uses the value*prob floor") {
  // n = 2, supportBound = 2, eps = 0.2: floor is 0.05.
  Instance inst;
  inst.variables.push_back(makeDistribution({{0.4, 0.1}, {1.0, 0.5}}, true));
  inst.variables.push_back(makeDistribution({{0.9, 0.5}}, true));
  Instance out = zeroSmallMeans(inst, 0.2, 2);
  // 0.4 * 0.1 = 0.04 <= 0.05 goes; 1.0 * 0.5 and 0.9 * 0.5 stay.
  CHECK(out.variables[0].nonzeroAtomCount() == 1);
  CHECK(out.variables[0].atoms.back().value == 1.0);
  CHECK(out.variables[1].nonzeroAtomCount() == 1);
}

TEST_CASE("bundleAboveOne merges the above-1 tail at its conditional mean") {
  Instance inst = singleVar({{0.5, 0.3}, {1.5, 0.1}, {2.0, 0.1}});
  TransformLog log;
  Instance out = bundleAboveOne(inst, &log);
  const auto& atoms = out.variables[0].atoms;
  REQUIRE(atoms.size() == 3);
  CHECK(atoms[2].value == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(atoms[2].prob == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out.variables[0].mean() == doctest::Approx(inst.variables[0].mean()).epsilon(1e-12));
  REQUIRE(log.steps.size() == 1);
  CHECK(log.steps[0].lossLowerFactor == 1.0);
  CHECK(log.steps[0].gainUpperFactor == 1.0);
}

TEST_CASE("bundling preserves the exact value on a normalized instance") {
  Instance raw;
  raw.variables.push_back(makeDistribution({{0.6, 0.4}, {1.3, 0.1}, {1.8, 0.08}}, true));
  raw.variables.push_back(makeDistribution({{0.9, 0.5}}, true));
  raw.variables.push_back(makeDistribution({{0.4, 0.3}, {1.2, 0.15}}, true));
  Instance norm = normalize(raw);
  double before = solveExact(norm).value();
  double after = solveExact(bundleAboveOne(norm)).value();
  CHECK(std::abs(before - after) <= 1e-12);
}

TEST_CASE("compressHighValues moves high atoms to the top value, mean preserved") {
  // eps = 0.3: high means value >= 1/0.09 = 11.11.
  Instance inst;
  inst.variables.push_back(makeDistribution({{12.0, 0.02}, {0.5, 0.4}}, true));
  inst.variables.push_back(makeDistribution({{20.0, 0.01}}, true));
  Instance out = compressHighValues(inst, 0.3);
  // Variable 0's high atom lands on vMax = 20 with mass 12*0.02/20.
  const auto& a0 = out.variables[0].atoms;
  CHECK(a0.back().value == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(a0.back().prob == doctest::Approx(0.012).epsilon(1e-12));
  CHECK(out.variables[0].mean() == doctest::Approx(inst.variables[0].mean()).epsilon(1e-12));
  CHECK(out.variables[1].atoms.back().prob == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("compressHighValues rejects forbidden and unbundled input") {
  Instance forbidden;
  forbidden.variables.push_back(makeDistribution({{20.0, 0.2}}, true));
  CHECK_THROWS_AS(compressHighValues(forbidden, 0.3), PipelineError);

  Instance unbundled;
  unbundled.variables.push_back(makeDistribution({{1.5, 0.02}, {20.0, 0.01}}, true));
  CHECK_THROWS_AS(compressHighValues(unbundled, 0.3), PipelineError);
}

TEST_CASE("zeroRareHighValues drops only rare high atoms") {
  // eps = 0.3, n = 8: the floor is eps/n = 0.0375.
  Instance inst;
  for (int i = 0; i < 6; ++i)
    inst.variables.push_back(makeDistribution({{0.5, 0.5}}, true));
  inst.variables.push_back(makeDistribution({{15.0, 0.01}}, true));
  inst.variables.push_back(makeDistribution({{15.0, 0.05}}, true));
  Instance out = zeroRareHighValues(inst, 0.3);
  CHECK(out.variables[6].nonzeroAtomCount() == 0);
  CHECK(out.variables[7].nonzeroAtomCount() == 1);
  CHECK(out.variables[0].nonzeroAtomCount() == 1);
}

TEST_CASE("classifyAtoms labels the value/probability quadrants") {
  // eps = 0.3, n = 1: preprocessing floor eps^3/n = 0.027.
  Instance inst = singleVar({{0.1, 0.2}, {0.5, 0.01}, {2.0, 0.3}});
  auto cases = classifyAtoms(inst, 0.3);
  REQUIRE(cases.size() == 1);
  const auto& atoms = inst.variables[0].atoms;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const PointMass& a = atoms[j];
    AtomCase c = cases[0][j];
    if (a.value < 0.3 || a.prob < 0.027) {
      CHECK(c == AtomCase::Preprocessing);
    } else if (a.value <= 1.0 / 0.09) {
      CHECK(c == AtomCase::Case1);
    }
  }

  Instance high = singleVar({{20.0, 0.05}});
  auto highCases = classifyAtoms(high, 0.3);
  CHECK(highCases[0].back() == AtomCase::Case2);

  Instance forbidden = singleVar({{20.0, 0.5}});
  auto forbiddenCases = classifyAtoms(forbidden, 0.3);
  CHECK(forbiddenCases[0].back() == AtomCase::Forbidden);
}

TEST_CASE("log factors compose multiplicatively") {
  TransformLog log;
  log.add({"a", 1, 0.0, 0.9, 1.0});
  log.add({"b", 1, 0.0, 0.8, 1.1});
  CHECK(log.composedLowerFactor() == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(log.composedUpperFactor() == doctest::Approx(1.1).epsilon(1e-12));
}

}  // TEST_SUITE
