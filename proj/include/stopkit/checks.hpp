#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stopkit/model.hpp"

namespace stopkit::checks {

struct CaseResult {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CaseResult> cases;
  std::vector<std::string> notes;
  int failures() const;
  bool pass() const { return failures() == 0; }
  std::string summary() const;
};

// Property batteries shared by the CLI `check` command and the acceptance
// runner. Each is deterministic given (count, seed).

// Golden continuation values of the fixed moment-matched pair, exact to
// 1e-12, plus the negative result for moment-based grouping.
SuiteReport counterexample();

// Exact solver against the order-enumeration oracle on random instances.
SuiteReport oracleEquivalence(int count, std::uint64_t seed);

// Grouped solver against the exact solver on instances with duplicated
// distributions, plus the memo-size accounting.
SuiteReport groupingSoundness(int count, std::uint64_t seed);

// Rounding values (probabilities) down to powers of 1+eps keeps at least a
// 1/(1+eps) fraction of the exact value; both roundings compose.
SuiteReport lemmaValuePerturb(int count, std::uint64_t seed,
                              std::vector<double> epsilons = {0.1, 0.3});
SuiteReport lemmaProbPerturb(int count, std::uint64_t seed,
                             std::vector<double> epsilons = {0.1, 0.3});

// Merging above-1 mass into its conditional mean leaves the exact value
// unchanged on normalized instances.
SuiteReport claimBundling(int count, std::uint64_t seed);

// Compressing high atoms onto the top value satisfies
// OPT(X) <= OPT(Y) <= (1+eps^2) OPT(X).
SuiteReport claimHighValue(int count, std::uint64_t seed, double eps = 0.3);

// End-to-end approximation on small two-point instances against the exact
// value: ratio within [1-6 eps, 1+eps].
SuiteReport qptasEndToEnd(int count, std::uint64_t seed, double eps = 0.2);

// Played value of a (1-eps)-undershooting oracle stays above
// (1-eps) OPT - 3 sem; at eps = 0 the mean matches OPT within 3 sem.
SuiteReport lemmaErrorProp(int count, std::uint64_t seed,
                           std::vector<double> epsilons = {0.0, 0.1}, int trials = 100'000);

// With no small-probability atoms, the frontloaded solver equals the
// grouped solver.
SuiteReport ptasDegenerate(int count, std::uint64_t seed);

// Game-chain estimates on small-probability swarms: every link's direction
// holds within 3 sem, the failure event stays below eps^2 + 3 sem, and
// small instances are anchored to the exact value.
SuiteReport gameChain(int count, std::uint64_t seed, double eps = 0.25, int trials = 4000,
                      bool anchorSmall = true);

// Identical seeds reproduce simulation results bit for bit.
SuiteReport reproducibility(std::uint64_t seed);

}  // namespace stopkit::checks
