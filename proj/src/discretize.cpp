#include "stopkit/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "stopkit/preprocess.hpp"

namespace stopkit {

namespace {

constexpr double kBoundaryRelTol = 1e-12;

bool nearlyEqual(double a, double b) {
  return std::abs(a - b) <= kBoundaryRelTol * std::max(std::abs(a), std::abs(b));
}

void checkEps(double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
}

}  // namespace

double powerValue(std::int64_t exponent, double eps) {
  return std::pow(1.0 + eps, static_cast<double>(exponent));
}

PowerKey roundDownToPower(double x, double eps) {
  checkEps(eps);
  if (!(x > 0.0))
    throw ValidationError("cannot round " + std::to_string(x) + " onto the power grid");
  auto k = static_cast<std::int64_t>(std::floor(std::log(x) / std::log1p(eps)));
  // log noise can land one step off; walk to the bracketing exponent, taking
  // x as on-grid when it sits within 1e-12 relative of a boundary.
  while (powerValue(k, eps) > x && !nearlyEqual(powerValue(k, eps), x)) --k;
  while (powerValue(k + 1, eps) <= x || nearlyEqual(powerValue(k + 1, eps), x)) ++k;
  return PowerKey{false, k};
}

std::string GroupKey::toString() const {
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += ";";
    out += "v";
    out += a.isVmax ? "VMAX" : std::to_string(a.valueExp);
    out += "p";
    out += std::to_string(a.probExp);
  }
  return out;
}

DiscretizeResult discretizeInstance(const Instance& instance, double eps) {
  checkEps(eps);
  const auto cases = classifyAtoms(instance, eps);
  DiscretizeResult result;
  result.instance.scale = instance.scale;
  result.instance.variables.reserve(instance.variables.size());
  result.keys.reserve(instance.variables.size());

  for (std::size_t vi = 0; vi < instance.variables.size(); ++vi) {
    const auto& var = instance.variables[vi];
    double zeroMass = 0.0;
    // Rounded value key -> exact probability mass mapped onto it. Distinct
    // values can land on the same power; their mass merges before the
    // probability rounding.
    std::map<std::pair<bool, std::int64_t>, double> buckets;  // (isVmax, exponent)
    std::map<std::pair<bool, std::int64_t>, double> bucketValue;
    for (std::size_t ai = 0; ai < var.atoms.size(); ++ai) {
      const auto& a = var.atoms[ai];
      if (a.value == 0.0) {
        zeroMass += a.prob;
        continue;
      }
      AtomCase c = cases[vi][ai];
      if (c == AtomCase::Forbidden)
        throw PipelineError("variable " + std::to_string(vi) + ": atom (" +
                            std::to_string(a.value) + ", " + std::to_string(a.prob) +
                            ") is not in a discretizable region; run the preparation "
                            "transforms first");
      if (c == AtomCase::Preprocessing) {
        // Own output sits at most one grid step under the entry floors, so
        // accept that much slack; it is what makes the map idempotent.
        const double probFloor = eps * eps * eps / static_cast<double>(instance.size());
        bool withinSlack =
            a.value * (1.0 + eps) >= eps && a.prob * (1.0 + eps) >= probFloor;
        if (!withinSlack)
          throw PipelineError("variable " + std::to_string(vi) + ": atom (" +
                              std::to_string(a.value) + ", " + std::to_string(a.prob) +
                              ") needs the preparation transforms first");
      }
      if (c == AtomCase::Case2) {
        buckets[{true, 0}] += a.prob;
        bucketValue[{true, 0}] = a.value;
      } else {
        PowerKey key = roundDownToPower(a.value, eps);
        buckets[{false, key.exponent}] += a.prob;
        bucketValue[{false, key.exponent}] = powerValue(key.exponent, eps);
      }
    }
    DiscreteDistribution dist;
    GroupKey gk;
    for (const auto& [bucket, mass] : buckets) {
      PowerKey pk = roundDownToPower(mass, eps);
      double roundedProb = powerValue(pk.exponent, eps);
      zeroMass += mass - roundedProb;
      dist.atoms.push_back({bucketValue.at(bucket), roundedProb});
      gk.atoms.push_back({bucket.first, bucket.second, pk.exponent});
    }
    if (zeroMass > 0.0) dist.atoms.push_back({0.0, zeroMass});
    std::sort(dist.atoms.begin(), dist.atoms.end(),
              [](const PointMass& x, const PointMass& y) { return x.value < y.value; });
    std::sort(gk.atoms.begin(), gk.atoms.end());
    result.instance.variables.push_back(std::move(dist));
    result.keys.push_back(std::move(gk));
  }
  return result;
}

Instance roundValuesToPowers(const Instance& instance, double eps) {
  checkEps(eps);
  Instance out = instance;
  for (auto& var : out.variables) {
    std::map<double, double> mass;
    for (const auto& a : var.atoms) {
      if (a.value == 0.0) {
        mass[0.0] += a.prob;
      } else {
        PowerKey key = roundDownToPower(a.value, eps);
        mass[powerValue(key.exponent, eps)] += a.prob;
      }
    }
    DiscreteDistribution d;
    for (const auto& [v, p] : mass) {
      if (p > 0.0) d.atoms.push_back({v, p});
    }
    var = std::move(d);
  }
  return out;
}

Instance roundProbsToPowers(const Instance& instance, double eps) {
  checkEps(eps);
  Instance out = instance;
  for (auto& var : out.variables) {
    double zeroMass = 0.0;
    DiscreteDistribution d;
    for (const auto& a : var.atoms) {
      if (a.value == 0.0) {
        zeroMass += a.prob;
        continue;
      }
      PowerKey pk = roundDownToPower(a.prob, eps);
      double rounded = powerValue(pk.exponent, eps);
      zeroMass += a.prob - rounded;
      d.atoms.push_back({a.value, rounded});
    }
    if (zeroMass > 0.0) d.atoms.push_back({0.0, zeroMass});
    std::sort(d.atoms.begin(), d.atoms.end(),
              [](const PointMass& x, const PointMass& y) { return x.value < y.value; });
    var = std::move(d);
  }
  return out;
}

GroupCountReport countGroups(const Instance& discretized, double eps, int supportBound) {
  if (supportBound < 1) throw ValidationError("supportBound must be at least 1");
  DiscretizeResult rediscretized = discretizeInstance(discretized, eps);
  GroupCountReport report;
  std::set<GroupKey> groups;
  std::set<std::pair<bool, std::int64_t>> valueKeys;
  std::set<std::int64_t> probKeys;
  for (const auto& key : rediscretized.keys) {
    groups.insert(key);
    for (const auto& a : key.atoms) {
      valueKeys.insert({a.isVmax, a.isVmax ? 0 : a.valueExp});
      probKeys.insert(a.probExp);
    }
  }
  report.distinctGroups = static_cast<int>(groups.size());
  report.valueKeys = static_cast<int>(valueKeys.size());
  report.probKeys = static_cast<int>(probKeys.size());
  report.pairCount = static_cast<std::int64_t>(report.valueKeys) * report.probKeys;
  double factorial = 1.0;
  for (int i = 2; i <= supportBound - 1; ++i) factorial *= i;
  report.bound = std::pow(static_cast<double>(report.pairCount),
                          static_cast<double>(supportBound)) /
                 factorial;
  report.withinBound = report.distinctGroups <= report.bound;
  return report;
}

}  // namespace stopkit
