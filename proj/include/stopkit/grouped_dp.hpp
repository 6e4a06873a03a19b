#pragma once

#include <cstdint>
#include <vector>

#include "stopkit/model.hpp"

namespace stopkit {

struct Group {
  DiscreteDistribution representative;
  int count = 0;
};

struct GroupedInstance {
  std::vector<Group> groups;
  int totalCount() const;
  Instance expand() const;  // back to one variable per count, group order
};

// Variables with structurally identical atom lists (same values, same probs,
// bitwise) share a group; groups keep first-appearance order.
GroupedInstance groupByIdenticalDistribution(const Instance& instance);

struct GroupedDpOptions {
  std::int64_t stateCap = 10'000'000;
};

// Threshold table indexed by count vectors: state (k'_1 .. k'_g) holds the
// optimal threshold when k'_i variables of group i are still to come.
// Exchangeability makes the count vector a sufficient state, so the table
// has prod(k_i + 1) entries instead of 2^n.
class GroupedDpValue {
 public:
  GroupedDpValue(std::vector<int> fullCounts, double value, std::vector<double> thresholds);

  double value() const { return value_; }
  const std::vector<int>& fullCounts() const { return fullCounts_; }
  std::int64_t stateCount() const { return static_cast<std::int64_t>(thresholds_.size()); }
  // Mixed-radix index of a remaining-count vector; throws ValidationError on
  // out-of-range counts.
  std::int64_t stateIndex(const std::vector<int>& remainingCounts) const;
  double thresholdAt(const std::vector<int>& remainingCounts) const;
  double thresholdAtIndex(std::int64_t state) const { return thresholds_[static_cast<std::size_t>(state)]; }
  const std::vector<std::int64_t>& strides() const { return strides_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

 private:
  std::vector<int> fullCounts_;
  std::vector<std::int64_t> strides_;
  double value_;
  std::vector<double> thresholds_;
};

// Same recursion as the exact solver but over count vectors, weighting each
// group by (remaining in group) / (remaining total).
GroupedDpValue solveGrouped(const GroupedInstance& grouped, const GroupedDpOptions& options = {});

// Number of memo states solveGrouped materializes: prod(k_i + 1).
std::int64_t memoSize(const GroupedInstance& grouped);

// Size accounting for the count-vector state space. The classical bound
// counts per-group cardinalities, so the asserted inequality is
// prod(k_i) <= ceil(K/g)^g, which holds for any split by the AM-GM
// inequality; the literal memo size prod(k_i + 1) is reported alongside.
struct GroupSizeCheck {
  std::int64_t stateCount = 0;          // prod(k_i + 1)
  std::int64_t cardinalityProduct = 0;  // prod(k_i)
  double bound = 0.0;                   // ceil(K/g)^g
  bool holds = false;
};
GroupSizeCheck groupSizeCheck(const GroupedInstance& grouped);

}  // namespace stopkit
