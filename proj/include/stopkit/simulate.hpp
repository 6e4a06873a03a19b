#pragma once

#include <cstdint>

#include "stopkit/exact_dp.hpp"
#include "stopkit/model.hpp"
#include "stopkit/qptas.hpp"
#include "stopkit/rng.hpp"

namespace stopkit {

struct SimResult {
  double mean = 0.0;
  double sem = 0.0;  // sample standard deviation / sqrt(trials)
  int trials = 0;
  std::uint64_t seed = 0;
};

struct SimOptions {
  // 0 = take STOPKIT_THREADS from the environment, defaulting to 1.
  int threads = 0;
};

// Plays `strategy` against uniformly random arrival orders. Each trial
// draws its own counter-derived stream, so results do not depend on the
// thread count, and the mean reduces by pairwise summation: identical seeds
// give bit-identical results.
SimResult runSim(const Instance& instance, const Strategy& strategy, int trials,
                 std::uint64_t seed, const SimOptions& options = {});

// Draws one realization by inverse-CDF walk; consumes one uniform.
double sampleRealization(const DiscreteDistribution& dist, SplitMix64& rng);

// Plays thresholds damped to (1-eps) of the exact continuation values, i.e.
// an oracle that is only promised to sit within [(1-eps) OPT, OPT] on every
// sub-instance, and checks the played value still clears
// (1-eps) OPT - 3 sem.
struct ErrorPropagationReport {
  double epsilon = 0.0;
  double exactValue = 0.0;
  SimResult sim;
  double bound = 0.0;  // (1-eps) * exactValue
  bool pass = false;
};

ErrorPropagationReport checkErrorPropagation(const Instance& instance, double eps, int trials,
                                             std::uint64_t seed, const SimOptions& options = {});

}  // namespace stopkit
