#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stopkit/discretize.hpp"
#include "stopkit/exact_dp.hpp"
#include "stopkit/grouped_dp.hpp"
#include "stopkit/model.hpp"
#include "stopkit/preprocess.hpp"

namespace stopkit {

// Output of the shared preparation pipeline: normalize, zero small values,
// zero small means, bundle above 1, compress high values, zero rare high
// values, discretize.
struct PipelineResult {
  Instance discretized;        // normalized units
  std::vector<GroupKey> keys;  // one per variable
  double normFactor = 1.0;     // E[max] divisor applied by normalize
  int supportBound = 1;        // max nonzero support size, used for the mean floor
  TransformLog log;
};

PipelineResult runQptasPipeline(const Instance& instance, const SchemeConfig& config);

struct QptasResult {
  // Approximate optimal value in the units of the input instance.
  double value = 0.0;
  double normFactor = 1.0;
  int supportBound = 1;
  TransformLog log;
  // Composed stage guarantees: value/OPT sits in
  // [composedLowerFactor, composedUpperFactor]; lossConstant C restates the
  // lower side as 1 - C*eps.
  double composedLowerFactor = 1.0;
  double composedUpperFactor = 1.0;
  double lossConstant = 0.0;
  Instance discretized;
  std::vector<GroupKey> keys;
  GroupedInstance grouped;
  std::shared_ptr<const GroupedDpValue> dp;
  std::vector<int> variableGroup;  // input variable index -> group index
};

// Full pipeline followed by the grouped solve. The grouped memo doubles as
// an approximate-optimum oracle for every remaining sub-instance, which is
// exactly what threshold play needs.
QptasResult solveQptas(const Instance& instance, const SchemeConfig& config);

// Threshold strategy: accept the current realization x (in input units) iff
// x >= threshold(remaining), where remaining lists the indices of variables
// that have not arrived yet (the current one excluded).
struct Strategy {
  std::string name;
  std::function<double(const std::vector<int>& remaining)> threshold;
};

using ApproxOracle = std::function<double(const std::vector<int>& remaining)>;

// Wraps an approximate-optimum oracle as the strategy that queries it on the
// remaining sub-instance at every step. When the oracle is within
// [(1-eps) OPT, OPT] on every sub-instance, this strategy keeps a (1-eps)
// fraction of the optimal value.
Strategy strategyFromOracle(std::string name, ApproxOracle oracle);

// Oracle backed by the grouped memo: the remaining set maps to its group
// count vector, so each query costs one table lookup after the single solve.
Strategy qptasStrategy(const QptasResult& result);

// Thresholds from the exact table, optionally damped by a multiplier (used
// to emulate an oracle that undershoots the optimum by a known factor).
Strategy exactStrategy(const DpValue& dp, double multiplier = 1.0);

}  // namespace stopkit
