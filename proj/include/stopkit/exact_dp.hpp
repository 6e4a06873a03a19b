#pragma once

#include <cstdint>
#include <vector>

#include "stopkit/model.hpp"

namespace stopkit {

using SubsetMask = std::uint32_t;

struct ExactDpOptions {
  // 2^n thresholds are materialized; past this, use the grouped solver or the
  // approximation pipelines.
  int maxVariables = 20;
};

// Online-optimal value of the random-arrival stopping game together with the
// full threshold table. thresholds()[mask] is the optimal acceptance
// threshold applied to the currently shown realization when `mask` is the
// set of variables still to come; it equals the expected reward of the game
// restricted to exactly that set. Immutable once built, safe to share.
class DpValue {
 public:
  DpValue(int n, double value, std::vector<double> thresholds);

  int variableCount() const { return n_; }
  double value() const { return value_; }
  SubsetMask fullMask() const { return static_cast<SubsetMask>((1u << n_) - 1u); }
  // Threshold for a remaining-set state; throws ValidationError on a mask
  // outside the solved instance.
  double thresholdAt(SubsetMask remaining) const;
  const std::vector<double>& thresholds() const { return thresholds_; }

 private:
  int n_;
  double value_;
  std::vector<double> thresholds_;
};

// Solves the stopping game exactly by averaging, over which variable arrives
// next, the expected best of "accept the realization" versus the optimal
// continuation on the rest. Ties accept. Identical distributions are NOT
// merged here; that is the grouped solver's job.
DpValue solveExact(const Instance& instance, const ExactDpOptions& options = {});

// Expected reward when `variable` is the one currently showing and
// `remaining` is the set still to come: E[max(X_variable, threshold)].
double continuationValue(const Instance& instance, const DpValue& dp, int variable,
                         SubsetMask remaining);

struct BruteForceOptions {
  int maxVariables = 7;
  // Conceptual enumeration size cap: joint support outcomes times n!.
  double maxWork = 1e7;
};

// Independent oracle for the same value: enumerates every arrival order of
// every subset and scores each order by direct backward enumeration over
// realizations, then averages orders. No one-step averaging recursion is
// shared with solveExact, so agreement is a real cross-check.
double bruteForceOracle(const Instance& instance, const BruteForceOptions& options = {});

}  // namespace stopkit
