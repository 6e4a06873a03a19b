#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "stopkit/gen.hpp"
#include "stopkit/model.hpp"

using namespace stopkit;

TEST_SUITE("model") {

TEST_CASE("makeDistribution merges equal values, sorts, pads to one") {
  DiscreteDistribution d = makeDistribution({{0.5, 0.25}, {0.25, 0.25}, {0.5, 0.1}}, true);
  REQUIRE(d.atoms.size() == 3);
  CHECK(d.atoms[0].value == 0.0);
  CHECK(d.atoms[0].prob == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(d.atoms[1].value == 0.25);
  CHECK(d.atoms[1].prob == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(d.atoms[2].value == 0.5);
  CHECK(d.atoms[2].prob == doctest::Approx(0.35).epsilon(1e-12));

  DiscreteDistribution dropped = makeDistribution({{1.0, 0.5}, {2.0, 0.0}, {3.0, -0.1}}, true);
  REQUIRE(dropped.atoms.size() == 2);
  CHECK(dropped.atoms[1].value == 1.0);
}

TEST_CASE("distribution moments on a hand-computed three-point law") {
  // {0: 1/8, 1/2: 3/4, 1: 1/8}
  DiscreteDistribution d = makeDistribution({{0.0, 0.125}, {0.5, 0.75}, {1.0, 0.125}});
  CHECK(d.mean() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.maxValue() == 1.0);
  CHECK(d.cdf(0.5) == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(d.cdf(0.49) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(d.massAbove(0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(d.expectedMaxAgainst(0.5) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(d.expectedMaxAgainst(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.nonzeroAtomCount() == 2);
}

TEST_CASE("validate flags mass deficits, negatives, and unsorted atoms") {
  Instance bad;
  bad.variables.push_back(DiscreteDistribution{{{0.0, 0.4}, {1.0, 0.4}}});
  CHECK_FALSE(validate(bad).ok());
  CHECK_THROWS_AS(requireValid(bad), ValidationError);

  Instance neg;
  neg.variables.push_back(DiscreteDistribution{{{-1.0, 0.5}, {1.0, 0.5}}});
  CHECK_FALSE(validate(neg).ok());

  Instance good = gen::counterexamplePair();
  CHECK(validate(good).ok());
  CHECK_NOTHROW(requireValid(good));
}

TEST_CASE("expectedMax and normalize on the fixed pair") {
  Instance pair = gen::counterexamplePair();
  CHECK(expectedMax(pair) == doctest::Approx(21.0 / 32.0).epsilon(1e-15));

  Instance norm = normalize(pair);
  CHECK(expectedMax(norm) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(norm.scale == doctest::Approx(21.0 / 32.0).epsilon(1e-12));
}

TEST_CASE("json files round-trip instances exactly") {
  Instance inst = gen::constSupport(4, 99, 3);
  const char* path = "model_roundtrip_tmp.json";
  writeInstance(inst, path);
  Instance back = readInstance(path);
  CHECK(back.variables == inst.variables);
  CHECK(back.scale == inst.scale);
  std::remove(path);

  CHECK(instanceToJsonText(inst).find("variables") != std::string::npos);
}

TEST_CASE("malformed instance files raise parse errors") {
  CHECK_THROWS_AS(readInstance("does_not_exist_tmp.json"), ParseError);

  const char* path = "model_malformed_tmp.json";
  {
    std::ofstream out(path);
    out << "{\"variables\": [{\"atoms\": [{\"value\": -1, \"prob\": 1.0}]}]}";
  }
  CHECK_THROWS_AS(readInstance(path), ParseError);
  std::remove(path);
}

}  // TEST_SUITE
