#include <cmath>

#include "doctest.h"
#include "stopkit/gen.hpp"
#include "stopkit/grouped_dp.hpp"
#include "stopkit/model.hpp"
#include "stopkit/ptas.hpp"
#include "stopkit/qptas.hpp"
#include "stopkit/rng.hpp"

using namespace stopkit;

TEST_SUITE("ptas") {

TEST_CASE("rate transform pair: inverses, edges, domain") {
  CHECK(qTransform(0.0) == 0.0);
  CHECK(qTransform(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (double p : {0.001, 0.02, 0.3, 0.9, 0.999}) {
    CHECK(pTransform(qTransform(p)) == doctest::Approx(p).epsilon(1e-12));
    CHECK(qTransform(p) >= p);  // -log(1-p) dominates p
  }
  CHECK(pTransform(0.0) == 0.0);
  CHECK_THROWS_AS(qTransform(1.0), ValidationError);
  CHECK_THROWS_AS(qTransform(-0.1), ValidationError);
}

TEST_CASE("swarm atoms classify small; ordinary probabilities stay special") {
  SchemeConfig config = SchemeConfig::desk(0.25);
  Instance swarm = gen::smallProbSwarm(40, 3, 1, 0.04, 2);
  PipelineResult pipe = runQptasPipeline(swarm, config);
  SplitResult split = splitSmallSpecial(pipe.discretized, config);
  CHECK(split.qMax > 0.0);
  CHECK(split.vMax > 0.0);
  CHECK(split.activeSmallClasses >= 1);
  int smalls = 0, specials = 0;
  for (const auto& cl : split.classes) {
    smalls += static_cast<int>(cl.smallAtoms.size());
    specials += static_cast<int>(cl.specialVariables.size());
    if (!cl.smallAtoms.empty() && !cl.ignored) {
      CHECK(cl.qStar <= 1.0 / config.epsilon + 1e-12);
      CHECK(cl.qOutside == doctest::Approx(0.25 * cl.qStar).epsilon(1e-12));
      CHECK(cl.redrawProb ==
            doctest::Approx(-std::expm1(-(1.0 - 0.25) * cl.qOutside)).epsilon(1e-12));
      CHECK(cl.delta > 0.0);
    }
  }
  CHECK(smalls >= 30);  // the 38 swarm variables
  CHECK(specials >= 1);
}

TEST_CASE("sure atoms never classify small") {
  SchemeConfig config = SchemeConfig::desk(0.25);
  Instance inst;
  inst.variables.push_back(makeDistribution({{1.0, 1.0}}));
  inst.variables.push_back(makeDistribution({{1.0, 0.01}}, true));
  SplitResult split = splitSmallSpecial(inst, config);
  REQUIRE(split.classes.size() == 1);
  const ValueClass& cl = split.classes[0];
  bool sureIsSpecial = false;
  for (int v : cl.specialVariables) sureIsSpecial = sureIsSpecial || v == 0;
  CHECK(sureIsSpecial);
  for (const auto& a : cl.smallAtoms) CHECK(a.variable != 0);
}

TEST_CASE("block positions: prefix, equal blocks, clamped tail") {
  ClassLayout cl;
  cl.b0End = 2;
  cl.blockLen = 3;
  cl.blockCount = 2;
  CHECK(cl.blockOf(1) == 0);
  CHECK(cl.blockOf(2) == 0);
  CHECK(cl.blockOf(3) == 1);
  CHECK(cl.blockOf(5) == 1);
  CHECK(cl.blockOf(6) == 2);
  CHECK(cl.blockOf(8) == 2);
  CHECK(cl.blockOf(9) == 2);  // tail clamps to the last block

  // A swarm over 12 positions at eps 1/4: delta = eps, so four blocks of
  // three positions and an empty prefix.
  SchemeConfig config = SchemeConfig::desk(0.25);
  Instance swarm = gen::smallProbSwarm(12, 3, 1, 0.02, 0);
  PipelineResult pipe = runQptasPipeline(swarm, config);
  SplitResult split = splitSmallSpecial(pipe.discretized, config);
  BlockLayout layout = buildBlocks(split.instance.size(), split, config);
  REQUIRE(layout.n == 12);
  REQUIRE(layout.classes.size() >= 1);
  for (const auto& lc : layout.classes) {
    CHECK(lc.blockCount == 4);
    CHECK(lc.blockLen == 3);
    CHECK(lc.b0End == 0);
    CHECK_FALSE(lc.degenerate);
  }
}

TEST_CASE("no small atoms: no active classes, solver equals the grouped value") {
  SchemeConfig config = SchemeConfig::desk(0.25);
  SplitMix64 seeds(17);
  for (int c = 0; c < 5; ++c) {
    Instance inst = gen::twoPointUniform(3 + c, seeds.next(), 0.3, 2.0, 0.15, 0.9);
    PipelineResult pipe = runQptasPipeline(inst, config);
    SplitResult split = splitSmallSpecial(pipe.discretized, config);
    REQUIRE(split.activeSmallClasses == 0);
    BlockLayout layout = buildBlocks(split.instance.size(), split, config);
    REQUIRE(layout.classes.empty());
    G5Result g5 = solveG5(split, layout, config);
    GroupedDpValue grouped = solveGrouped(groupByIdenticalDistribution(split.instance));
    REQUIRE(std::abs(g5.value - grouped.value()) <= 1e-9);
  }
}

TEST_CASE("special truncation separates small atoms as binaries") {
  SchemeConfig config = SchemeConfig::desk(0.25);
  // Small cutoff on rates is eps^2 = 0.0625; p = 0.001 is small, 0.3 is not.
  DiscreteDistribution var =
      makeDistribution({{0.4, 0.001}, {1.0, 0.3}}, true);
  Truncation t = specialTruncation(var, config);
  REQUIRE(t.binaries.size() == 1);
  CHECK(t.binaryValues[0] == 0.4);
  CHECK(t.binaries[0].massAbove(0.0) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(t.truncated.massAbove(0.0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(t.truncated.maxValue() == 1.0);
}

TEST_CASE("frontloaded solve and chain simulation on an equal-rate swarm") {
  SchemeConfig config = SchemeConfig::desk(0.25);
  // Identical rates put exactly blockLen equal atoms in every numbered
  // block, so the failure event cannot occur.
  Instance swarm;
  swarm.variables.assign(12, makeDistribution({{1.3, 0.015}}, true));
  PipelineResult pipe = runQptasPipeline(swarm, config);
  SplitResult split = splitSmallSpecial(pipe.discretized, config);
  BlockLayout layout = buildBlocks(split.instance.size(), split, config);
  G5Result g5 = solveG5(split, layout, config);
  CHECK(g5.value > 0.0);
  CHECK(g5.value <= (1.0 + 0.25) * 1.0 + 0.05);  // normalized units

  GameChainReport chain = simulateGameChain(split, layout, config, g5, 600, 11);
  CHECK(chain.trials == 600);
  // Equal per-block counts make the failure event impossible here.
  CHECK(chain.failureRate == 0.0);
  CHECK(std::abs(chain.g5.mean - chain.g5SolverValue) <= 4.0 * chain.g5.sem);
  CHECK(chain.g1.mean > 0.0);
  REQUIRE(chain.rewards1.size() == 600);
  REQUIRE(chain.rewards5.size() == 600);

  GameChainReport again = simulateGameChain(split, layout, config, g5, 600, 11);
  CHECK(again.rewards1 == chain.rewards1);
  CHECK(again.rewards5 == chain.rewards5);
}

TEST_CASE("state caps raise limit errors") {
  SchemeConfig config = SchemeConfig::desk(0.25);
  Instance swarm = gen::smallProbSwarm(12, 7, 1, 0.02, 1);
  PipelineResult pipe = runQptasPipeline(swarm, config);
  SplitResult split = splitSmallSpecial(pipe.discretized, config);
  BlockLayout layout = buildBlocks(split.instance.size(), split, config);
  CHECK_THROWS_AS(solveG5(split, layout, config, 4), LimitError);
}

TEST_CASE("full pipeline solve reports consistent units") {
  SchemeConfig config = SchemeConfig::desk(0.25);
  Instance swarm = gen::smallProbSwarm(12, 9, 1, 0.02, 1);
  PtasResult r = solvePtas(swarm, config);
  CHECK(r.value > 0.0);
  CHECK(r.normFactor > 0.0);
  CHECK(r.value == doctest::Approx(r.g5.value * r.normFactor).epsilon(1e-12));

  Strategy s = ptasStrategy(r);
  CHECK(s.name == "ptas");
  CHECK(s.threshold({}) == 0.0);
  std::vector<int> all;
  for (int i = 0; i < r.split.instance.size(); ++i) all.push_back(i);
  CHECK(s.threshold(all) >= 0.0);
}

}  // TEST_SUITE
