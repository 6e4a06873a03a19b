#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "stopkit/exact_dp.hpp"
#include "stopkit/gen.hpp"
#include "stopkit/grouped_dp.hpp"
#include "stopkit/rng.hpp"

using namespace stopkit;

namespace {

Instance withCopies(std::uint64_t seed, int distinct, int maxCopies) {
  SplitMix64 rng(seed);
  Instance inst;
  for (int d = 0; d < distinct; ++d) {
    Instance one = gen::constSupport(1, rng.next(), 3);
    int copies = rng.nextInt(1, maxCopies);
    for (int c = 0; c < copies; ++c) inst.variables.push_back(one.variables[0]);
  }
  fisherYates(inst.variables, rng);
  return inst;
}

}  // namespace

TEST_SUITE("grouped-dp") {

TEST_CASE("identical distributions collapse into one group") {
  Instance inst = withCopies(3, 3, 3);
  GroupedInstance grouped = groupByIdenticalDistribution(inst);
  CHECK(grouped.groups.size() <= 3);
  CHECK(grouped.totalCount() == inst.size());

  // Expansion preserves the multiset of variables, hence the exact value.
  Instance expanded = grouped.expand();
  CHECK(std::abs(solveExact(expanded).value() - solveExact(inst).value()) <= 1e-12);
}

TEST_CASE("grouped value equals the exact value") {
  SplitMix64 seeds(77);
  for (int c = 0; c < 20; ++c) {
    Instance inst = withCopies(seeds.next(), 2 + c % 3, 4);
    if (inst.size() > 12) continue;
    GroupedInstance grouped = groupByIdenticalDistribution(inst);
    GroupedDpValue g = solveGrouped(grouped);
    DpValue e = solveExact(inst);
    REQUIRE(std::abs(g.value() - e.value()) <= 1e-9);
  }
}

TEST_CASE("count states: indexing, thresholds, memo size") {
  Instance inst = withCopies(11, 2, 3);
  GroupedInstance grouped = groupByIdenticalDistribution(inst);
  GroupedDpValue g = solveGrouped(grouped);

  std::vector<int> zeros(grouped.groups.size(), 0);
  CHECK(g.stateIndex(zeros) == 0);
  CHECK(g.thresholdAt(zeros) == 0.0);
  CHECK(g.thresholdAt(g.fullCounts()) == doctest::Approx(g.value()).epsilon(1e-15));

  std::int64_t expect = 1;
  for (int k : g.fullCounts()) expect *= k + 1;
  CHECK(g.stateCount() == expect);
  CHECK(memoSize(grouped) == expect);

  std::vector<int> over = g.fullCounts();
  over[0] += 1;
  CHECK_THROWS_AS(g.stateIndex(over), ValidationError);
}

TEST_CASE("grouped thresholds match exact thresholds on mapped states") {
  // Two copies of one distribution plus one other: remaining sets with the
  // same group counts share a threshold, and it matches the exact table.
  SplitMix64 rng(5);
  Instance one = gen::constSupport(1, rng.next(), 3);
  Instance other = gen::constSupport(1, rng.next(), 3);
  Instance inst;
  inst.variables = {one.variables[0], one.variables[0], other.variables[0]};

  DpValue e = solveExact(inst);
  GroupedDpValue g = solveGrouped(groupByIdenticalDistribution(inst));
  // Remaining {0} and {1} are copies: exact thresholds agree and match the
  // grouped state (1, 0).
  CHECK(std::abs(e.thresholdAt(0b001) - e.thresholdAt(0b010)) <= 1e-12);
  CHECK(std::abs(g.thresholdAt({1, 0}) - e.thresholdAt(0b001)) <= 1e-12);
  CHECK(std::abs(g.thresholdAt({1, 1}) - e.thresholdAt(0b101)) <= 1e-12);
}

TEST_CASE("memo accounting bound holds") {
  SplitMix64 seeds(13);
  for (int c = 0; c < 10; ++c) {
    Instance inst = withCopies(seeds.next(), 1 + c % 4, 4);
    GroupSizeCheck check = groupSizeCheck(groupByIdenticalDistribution(inst));
    REQUIRE(check.holds);
    REQUIRE(check.cardinalityProduct <= check.stateCount);
  }
}

TEST_CASE("state cap raises a limit error") {
  Instance inst = withCopies(21, 3, 4);
  GroupedDpOptions tight;
  tight.stateCap = 2;
  CHECK_THROWS_AS(solveGrouped(groupByIdenticalDistribution(inst), tight), LimitError);
}

}  // TEST_SUITE
