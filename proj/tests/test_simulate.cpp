#include <cmath>

#include "doctest.h"
#include "stopkit/exact_dp.hpp"
#include "stopkit/gen.hpp"
#include "stopkit/model.hpp"
#include "stopkit/qptas.hpp"
#include "stopkit/rng.hpp"
#include "stopkit/simulate.hpp"

using namespace stopkit;

TEST_SUITE("simulate") {

TEST_CASE("sampleRealization follows the distribution") {
  DiscreteDistribution sure = makeDistribution({{2.0, 1.0}});
  SplitMix64 rng(1);
  for (int i = 0; i < 10; ++i) CHECK(sampleRealization(sure, rng) == 2.0);

  DiscreteDistribution coin = makeDistribution({{0.0, 0.5}, {1.0, 0.5}});
  double total = 0.0;
  for (int i = 0; i < 4000; ++i) total += sampleRealization(coin, rng);
  CHECK(total / 4000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("always-accept and never-accept strategies bracket the game") {
  Instance pair = gen::counterexamplePair();
  Strategy accept = strategyFromOracle("zero", [](const std::vector<int>&) { return 0.0; });
  SimResult first = runSim(pair, accept, 20000, 3);
  // Accepting the first arrival earns the average mean, 1/2.
  CHECK(std::abs(first.mean - 0.5) <= 4.0 * first.sem);

  Strategy never =
      strategyFromOracle("huge", [](const std::vector<int>&) { return 1e18; });
  SimResult nothing = runSim(pair, never, 2000, 3);
  CHECK(nothing.mean == 0.0);
}

TEST_CASE("exact thresholds reach the exact value in simulation") {
  Instance pair = gen::counterexamplePair();
  DpValue dp = solveExact(pair);
  SimResult sim = runSim(pair, exactStrategy(dp), 50000, 9);
  CHECK(std::abs(sim.mean - dp.value()) <= 4.0 * sim.sem);
  CHECK(sim.trials == 50000);
  CHECK(sim.seed == 9);
  CHECK(sim.sem > 0.0);
}

TEST_CASE("identical seeds are bit-identical; thread count does not matter") {
  Instance inst = gen::constSupport(5, 21, 3);
  DpValue dp = solveExact(inst);
  Strategy s = exactStrategy(dp);
  SimResult a = runSim(inst, s, 30000, 7);
  SimResult b = runSim(inst, s, 30000, 7);
  CHECK(a.mean == b.mean);
  CHECK(a.sem == b.sem);

  SimOptions one, four;
  one.threads = 1;
  four.threads = 4;
  SimResult c = runSim(inst, s, 30000, 7, one);
  SimResult d = runSim(inst, s, 30000, 7, four);
  CHECK(c.mean == d.mean);
  CHECK(c.sem == d.sem);
  CHECK(a.mean == c.mean);

  SimResult other = runSim(inst, s, 30000, 8);
  CHECK(other.mean != a.mean);
}

TEST_CASE("an undershooting oracle still clears its guarantee") {
  Instance inst = gen::twoPointUniform(6, 33);
  for (double eps : {0.0, 0.2}) {
    ErrorPropagationReport r = checkErrorPropagation(inst, eps, 40000, 5);
    REQUIRE(r.pass);
    CHECK(r.epsilon == eps);
    CHECK(r.bound == doctest::Approx((1.0 - eps) * r.exactValue).epsilon(1e-12));
    CHECK(r.sim.mean >= r.bound - 3.0 * r.sim.sem);
    // Played value never beats the optimum by more than noise.
    CHECK(r.sim.mean <= r.exactValue + 3.0 * r.sim.sem);
  }
}

}  // TEST_SUITE
