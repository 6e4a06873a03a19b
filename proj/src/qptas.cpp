#include "stopkit/qptas.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace stopkit {

PipelineResult runQptasPipeline(const Instance& instance, const SchemeConfig& config) {
  config.validate();
  requireValid(instance);
  const double eps = config.epsilon;

  PipelineResult result;
  Instance normalized = normalize(instance);
  result.normFactor = normalized.scale / instance.scale;

  result.supportBound = 1;
  for (const auto& var : normalized.variables)
    result.supportBound = std::max(result.supportBound, var.nonzeroAtomCount());

  Instance staged = zeroSmallValues(normalized, eps, &result.log);
  staged = zeroSmallMeans(staged, eps, result.supportBound, &result.log);
  staged = bundleAboveOne(staged, &result.log);
  staged = compressHighValues(staged, eps, &result.log);
  staged = zeroRareHighValues(staged, eps, &result.log);

  DiscretizeResult disc = discretizeInstance(staged, eps);
  result.log.add({"discretize", instance.size(), 0.0, 1.0 / ((1.0 + eps) * (1.0 + eps)), 1.0});
  result.discretized = std::move(disc.instance);
  result.keys = std::move(disc.keys);
  return result;
}

QptasResult solveQptas(const Instance& instance, const SchemeConfig& config) {
  PipelineResult pipeline = runQptasPipeline(instance, config);

  QptasResult result;
  result.normFactor = pipeline.normFactor;
  result.supportBound = pipeline.supportBound;
  result.log = pipeline.log;
  result.discretized = std::move(pipeline.discretized);
  result.keys = std::move(pipeline.keys);

  // Group by the integer keys: identical keys mean identical discretized
  // distributions, so the grouped solve is exact for the discretized
  // instance.
  std::map<GroupKey, int> groupOf;
  result.variableGroup.reserve(result.keys.size());
  GroupedInstance grouped;
  for (std::size_t i = 0; i < result.keys.size(); ++i) {
    auto [it, inserted] =
        groupOf.emplace(result.keys[i], static_cast<int>(grouped.groups.size()));
    if (inserted) {
      grouped.groups.push_back({result.discretized.variables[i], 1});
    } else {
      ++grouped.groups[static_cast<std::size_t>(it->second)].count;
    }
    result.variableGroup.push_back(it->second);
  }
  result.grouped = std::move(grouped);
  result.dp = std::make_shared<const GroupedDpValue>(solveGrouped(result.grouped));
  result.value = result.dp->value() * result.normFactor;
  result.composedLowerFactor = result.log.composedLowerFactor();
  result.composedUpperFactor = result.log.composedUpperFactor();
  result.lossConstant = (1.0 - result.composedLowerFactor) / config.epsilon;
  return result;
}

Strategy strategyFromOracle(std::string name, ApproxOracle oracle) {
  Strategy s;
  s.name = std::move(name);
  s.threshold = std::move(oracle);
  return s;
}

Strategy qptasStrategy(const QptasResult& result) {
  auto dp = result.dp;
  auto variableGroup = result.variableGroup;
  int groups = static_cast<int>(result.grouped.groups.size());
  double scaleBack = result.normFactor;
  return strategyFromOracle("qptas", [dp, variableGroup, groups,
                                      scaleBack](const std::vector<int>& remaining) {
    std::vector<int> counts(static_cast<std::size_t>(groups), 0);
    for (int v : remaining) ++counts[static_cast<std::size_t>(variableGroup[static_cast<std::size_t>(v)])];
    return dp->thresholdAt(counts) * scaleBack;
  });
}

Strategy exactStrategy(const DpValue& dp, double multiplier) {
  auto thresholds = dp.thresholds();  // copy; strategies may outlive the DP
  return strategyFromOracle("exact", [thresholds, multiplier](const std::vector<int>& remaining) {
    SubsetMask mask = 0;
    for (int v : remaining) mask |= SubsetMask{1} << v;
    return thresholds[mask] * multiplier;
  });
}

}  // namespace stopkit
