#include <algorithm>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "stopkit/rng.hpp"

using namespace stopkit;

TEST_SUITE("rng") {

TEST_CASE("identical seeds produce identical streams") {
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next() == b.next());
}

TEST_CASE("distinct substreams of one root differ") {
  SplitMix64 a = SplitMix64::stream(7, 0);
  SplitMix64 b = SplitMix64::stream(7, 1);
  CHECK(a.next() != b.next());

  // Substream derivation ignores parent consumption.
  SplitMix64 parentFresh = SplitMix64::stream(9, 3);
  SplitMix64 scratch(9);
  scratch.next();
  SplitMix64 parentUsed = SplitMix64::stream(9, 3);
  CHECK(parentFresh.next() == parentUsed.next());
}

TEST_CASE("uniform helpers respect their ranges") {
  SplitMix64 rng(123);
  bool hit[4] = {false, false, false, false};
  for (int i = 0; i < 2000; ++i) {
    double u = rng.nextDouble();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    int k = rng.nextInt(2, 5);
    REQUIRE(k >= 2);
    REQUIRE(k <= 5);
    hit[k - 2] = true;
    double x = rng.nextInRange(-1.5, 2.5);
    REQUIRE(x >= -1.5);
    REQUIRE(x <= 2.5);
  }
  CHECK((hit[0] && hit[1] && hit[2] && hit[3]));
}

TEST_CASE("fisherYates permutes") {
  SplitMix64 rng(5);
  std::vector<int> v(10);
  std::iota(v.begin(), v.end(), 0);
  fisherYates(v, rng);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(10);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);

  // Different seeds give different orders somewhere in a small batch.
  SplitMix64 rng2(6);
  std::vector<int> w(10);
  std::iota(w.begin(), w.end(), 0);
  fisherYates(w, rng2);
  CHECK(v != w);
}

TEST_CASE("pairwiseSum matches a long-double running sum") {
  SplitMix64 rng(11);
  std::vector<double> data(1001);
  long double naive = 0.0L;
  for (double& x : data) {
    x = rng.nextInRange(-1.0, 1.0);
    naive += static_cast<long double>(x);
  }
  CHECK(pairwiseSum(data) == doctest::Approx(static_cast<double>(naive)).epsilon(1e-12));
  CHECK(pairwiseSum(nullptr, 0) == 0.0);
  std::vector<double> one{3.5};
  CHECK(pairwiseSum(one) == 3.5);
}

}  // TEST_SUITE
