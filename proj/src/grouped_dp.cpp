#include "stopkit/grouped_dp.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace stopkit {

int GroupedInstance::totalCount() const {
  int total = 0;
  for (const auto& g : groups) total += g.count;
  return total;
}

Instance GroupedInstance::expand() const {
  Instance inst;
  for (const auto& g : groups) {
    for (int i = 0; i < g.count; ++i) inst.variables.push_back(g.representative);
  }
  return inst;
}

GroupedInstance groupByIdenticalDistribution(const Instance& instance) {
  GroupedInstance out;
  std::map<std::vector<std::pair<double, double>>, std::size_t> seen;
  for (const auto& var : instance.variables) {
    std::vector<std::pair<double, double>> key;
    key.reserve(var.atoms.size());
    for (const auto& a : var.atoms) key.emplace_back(a.value, a.prob);
    auto [it, inserted] = seen.emplace(std::move(key), out.groups.size());
    if (inserted) {
      out.groups.push_back({var, 1});
    } else {
      ++out.groups[it->second].count;
    }
  }
  return out;
}

GroupedDpValue::GroupedDpValue(std::vector<int> fullCounts, double value,
                               std::vector<double> thresholds)
    : fullCounts_(std::move(fullCounts)), value_(value), thresholds_(std::move(thresholds)) {
  strides_.resize(fullCounts_.size());
  std::int64_t stride = 1;
  for (std::size_t i = 0; i < fullCounts_.size(); ++i) {
    strides_[i] = stride;
    stride *= fullCounts_[i] + 1;
  }
}

std::int64_t GroupedDpValue::stateIndex(const std::vector<int>& remainingCounts) const {
  if (remainingCounts.size() != fullCounts_.size())
    throw ValidationError("count vector has " + std::to_string(remainingCounts.size()) +
                          " entries, expected " + std::to_string(fullCounts_.size()));
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < remainingCounts.size(); ++i) {
    if (remainingCounts[i] < 0 || remainingCounts[i] > fullCounts_[i])
      throw ValidationError("count " + std::to_string(remainingCounts[i]) + " for group " +
                            std::to_string(i) + " is outside [0, " +
                            std::to_string(fullCounts_[i]) + "]");
    idx += strides_[i] * remainingCounts[i];
  }
  return idx;
}

double GroupedDpValue::thresholdAt(const std::vector<int>& remainingCounts) const {
  return thresholds_[static_cast<std::size_t>(stateIndex(remainingCounts))];
}

std::int64_t memoSize(const GroupedInstance& grouped) {
  std::int64_t states = 1;
  for (const auto& g : grouped.groups) states *= g.count + 1;
  return states;
}

GroupedDpValue solveGrouped(const GroupedInstance& grouped, const GroupedDpOptions& options) {
  const std::size_t g = grouped.groups.size();
  if (g == 0) throw ValidationError("empty grouped instance");
  for (const auto& gr : grouped.groups) {
    if (gr.count < 1) throw ValidationError("group counts must be positive");
  }
  std::int64_t states = memoSize(grouped);
  if (states > options.stateCap)
    throw LimitError("grouped solve needs " + std::to_string(states) +
                     " states, over the cap of " + std::to_string(options.stateCap));

  std::vector<int> fullCounts(g);
  std::vector<std::int64_t> strides(g);
  std::int64_t stride = 1;
  for (std::size_t i = 0; i < g; ++i) {
    fullCounts[i] = grouped.groups[i].count;
    strides[i] = stride;
    stride *= fullCounts[i] + 1;
  }

  std::vector<double> th(static_cast<std::size_t>(states), 0.0);
  // Odometer decode: counts tracks the digits of idx in the mixed radix, so
  // each state visit costs O(g). Lowering any digit lowers the index, so
  // every predecessor state is already final.
  std::vector<int> counts(g, 0);
  for (std::int64_t idx = 1; idx < states; ++idx) {
    std::size_t d = 0;
    while (counts[d] == fullCounts[d]) {
      counts[d] = 0;
      ++d;
    }
    ++counts[d];
    int remaining = 0;
    for (std::size_t i = 0; i < g; ++i) remaining += counts[i];
    double sum = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      if (counts[i] == 0) continue;
      double contAfter = th[static_cast<std::size_t>(idx - strides[i])];
      sum += counts[i] * grouped.groups[i].representative.expectedMaxAgainst(contAfter);
    }
    th[static_cast<std::size_t>(idx)] = sum / remaining;
  }
  double value = th[static_cast<std::size_t>(states - 1)];
  return GroupedDpValue(std::move(fullCounts), value, std::move(th));
}

GroupSizeCheck groupSizeCheck(const GroupedInstance& grouped) {
  GroupSizeCheck check;
  check.stateCount = memoSize(grouped);
  check.cardinalityProduct = 1;
  for (const auto& g : grouped.groups) check.cardinalityProduct *= g.count;
  double k = static_cast<double>(grouped.totalCount());
  double gn = static_cast<double>(grouped.groups.size());
  check.bound = std::pow(std::ceil(k / gn), gn);
  check.holds = static_cast<double>(check.cardinalityProduct) <= check.bound + 0.5;
  return check;
}

}  // namespace stopkit
