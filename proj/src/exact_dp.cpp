#include "stopkit/exact_dp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

namespace stopkit {

DpValue::DpValue(int n, double value, std::vector<double> thresholds)
    : n_(n), value_(value), thresholds_(std::move(thresholds)) {}

double DpValue::thresholdAt(SubsetMask remaining) const {
  if (remaining >= thresholds_.size())
    throw ValidationError("state " + std::to_string(remaining) +
                          " is outside the solved instance of " + std::to_string(n_) +
                          " variables");
  return thresholds_[remaining];
}

DpValue solveExact(const Instance& instance, const ExactDpOptions& options) {
  const int n = instance.size();
  if (n < 1) throw ValidationError("empty instance");
  if (n > options.maxVariables)
    throw LimitError("exact solve of " + std::to_string(n) + " variables exceeds the cap of " +
                     std::to_string(options.maxVariables) +
                     "; use the grouped solver or the approximation pipelines");

  const std::size_t states = std::size_t{1} << n;
  std::vector<double> th(states, 0.0);
  // States ordered by value: every strict subset has a smaller index.
  for (std::size_t mask = 1; mask < states; ++mask) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (std::size_t{1} << i))) continue;
      std::size_t rest = mask ^ (std::size_t{1} << i);
      sum += instance.variables[static_cast<std::size_t>(i)].expectedMaxAgainst(th[rest]);
    }
    th[mask] = sum / static_cast<double>(std::popcount(mask));
  }
  double value = th[states - 1];
  return DpValue(n, value, std::move(th));
}

double continuationValue(const Instance& instance, const DpValue& dp, int variable,
                         SubsetMask remaining) {
  if (variable < 0 || variable >= instance.size())
    throw ValidationError("variable index out of range");
  if (remaining & (SubsetMask{1} << variable))
    throw ValidationError("current variable cannot be in the remaining set");
  double t = dp.thresholdAt(remaining);
  return instance.variables[static_cast<std::size_t>(variable)].expectedMaxAgainst(t);
}

namespace {

// Expected reward of playing a fixed arrival order, thresholds taken from
// `cont` on the suffix sets. Walks the order backward.
double orderedValue(const Instance& instance, const std::vector<int>& order,
                    const std::vector<double>& cont) {
  double after = 0.0;  // value of the game starting just past the end
  SubsetMask suffix = 0;
  for (std::size_t t = order.size(); t-- > 0;) {
    const auto& dist = instance.variables[static_cast<std::size_t>(order[t])];
    double threshold = cont[suffix];
    double v = 0.0;
    for (const auto& a : dist.atoms)
      v += a.prob * (a.value >= threshold ? a.value : after);
    after = v;
    suffix |= SubsetMask{1} << order[t];
  }
  return after;
}

}  // namespace

double bruteForceOracle(const Instance& instance, const BruteForceOptions& options) {
  const int n = instance.size();
  if (n < 1) throw ValidationError("empty instance");
  if (n > options.maxVariables)
    throw LimitError("brute force limited to " + std::to_string(options.maxVariables) +
                     " variables");
  double outcomes = 1.0;
  for (const auto& var : instance.variables) outcomes *= static_cast<double>(var.atoms.size());
  double factorial = 1.0;
  for (int i = 2; i <= n; ++i) factorial *= i;
  if (outcomes * factorial > options.maxWork)
    throw LimitError("brute force enumeration of " + std::to_string(outcomes * factorial) +
                     " paths exceeds the work cap");

  const std::size_t states = std::size_t{1} << n;
  // cont[S]: value of the game on the set S, averaged over every ordering of
  // S. Built by set size, so orderedValue only ever reads finished entries.
  std::vector<double> cont(states, 0.0);
  for (std::size_t mask = 1; mask < states; ++mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) members.push_back(i);
    }
    std::sort(members.begin(), members.end());
    double total = 0.0;
    std::size_t count = 0;
    do {
      total += orderedValue(instance, members, cont);
      ++count;
    } while (std::next_permutation(members.begin(), members.end()));
    cont[mask] = total / static_cast<double>(count);
  }
  return cont[states - 1];
}

}  // namespace stopkit
