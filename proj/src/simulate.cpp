#include "stopkit/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

namespace stopkit {

double sampleRealization(const DiscreteDistribution& dist, SplitMix64& rng) {
  double u = rng.nextDouble();
  double cumulative = 0.0;
  for (const auto& a : dist.atoms) {
    cumulative += a.prob;
    if (u < cumulative) return a.value;
  }
  return dist.atoms.back().value;  // mass tolerance slack
}

namespace {

int resolveThreads(const SimOptions& options) {
  if (options.threads > 0) return options.threads;
  if (const char* env = std::getenv("STOPKIT_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 1;
}

double playOneTrial(const Instance& instance, const Strategy& strategy, SplitMix64& rng,
                    std::vector<int>& order) {
  const int n = instance.size();
  order.resize(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  fisherYates(order, rng);
  std::vector<int> remaining(order.begin(), order.end());
  for (int t = 0; t < n; ++t) {
    int current = order[static_cast<std::size_t>(t)];
    remaining.erase(remaining.begin());
    double x = sampleRealization(instance.variables[static_cast<std::size_t>(current)], rng);
    if (x >= strategy.threshold(remaining)) return x;
  }
  return 0.0;
}

}  // namespace

SimResult runSim(const Instance& instance, const Strategy& strategy, int trials,
                 std::uint64_t seed, const SimOptions& options) {
  requireValid(instance);
  if (trials < 1) throw ValidationError("trials must be positive");
  std::vector<double> rewards(static_cast<std::size_t>(trials), 0.0);

  auto worker = [&](int begin, int end) {
    std::vector<int> order;
    // The trial stream derives from the trial index, never from the thread,
    // so the reward vector is identical for any thread count.
    for (int t = begin; t < end; ++t) {
      SplitMix64 rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(t));
      rewards[static_cast<std::size_t>(t)] = playOneTrial(instance, strategy, rng, order);
    }
  };

  int threads = std::min(resolveThreads(options), trials);
  if (threads <= 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    int chunk = (trials + threads - 1) / threads;
    for (int i = 0; i < threads; ++i) {
      int begin = i * chunk;
      int end = std::min(trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  SimResult result;
  result.trials = trials;
  result.seed = seed;
  result.mean = pairwiseSum(rewards) / trials;
  if (trials > 1) {
    std::vector<double> sq(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) {
      double d = rewards[i] - result.mean;
      sq[i] = d * d;
    }
    double var = pairwiseSum(sq) / (trials - 1);
    result.sem = std::sqrt(var / trials);
  }
  return result;
}

ErrorPropagationReport checkErrorPropagation(const Instance& instance, double eps, int trials,
                                             std::uint64_t seed, const SimOptions& options) {
  if (!(eps >= 0.0) || !(eps < 1.0)) throw ValidationError("eps must lie in [0, 1)");
  ErrorPropagationReport report;
  report.epsilon = eps;
  DpValue dp = solveExact(instance);
  report.exactValue = dp.value();
  Strategy damped = exactStrategy(dp, 1.0 - eps);
  report.sim = runSim(instance, damped, trials, seed, options);
  report.bound = (1.0 - eps) * report.exactValue;
  report.pass = report.sim.mean >= report.bound - 3.0 * report.sim.sem;
  return report;
}

}  // namespace stopkit
