#include "stopkit/preprocess.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace stopkit {

void TransformLog::add(TransformStep step) { steps.push_back(std::move(step)); }

double TransformLog::composedLowerFactor() const {
  double f = 1.0;
  for (const auto& s : steps) f *= s.lossLowerFactor;
  return f;
}

double TransformLog::composedUpperFactor() const {
  double f = 1.0;
  for (const auto& s : steps) f *= s.gainUpperFactor;
  return f;
}

namespace {

DiscreteDistribution fromMass(const std::map<double, double>& mass) {
  DiscreteDistribution d;
  for (const auto& [v, p] : mass) {
    if (p > 0.0) d.atoms.push_back({v, p});
  }
  return d;
}

void checkEps(double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw ValidationError("eps must lie in (0, 1)");
}

}  // namespace

Instance zeroSmallValues(const Instance& instance, double eps, TransformLog* log) {
  checkEps(eps);
  Instance out = instance;
  int touched = 0;
  double moved = 0.0;
  for (auto& var : out.variables) {
    bool hit = false;
    std::map<double, double> mass;
    for (const auto& a : var.atoms) {
      if (a.value > 0.0 && a.value < eps) {
        mass[0.0] += a.prob;
        moved += a.prob;
        hit = true;
      } else {
        mass[a.value] += a.prob;
      }
    }
    if (hit) {
      var = fromMass(mass);
      ++touched;
    }
  }
  if (log) log->add({"zeroSmallValues", touched, moved, 1.0 - 1.5 * eps, 1.0});
  return out;
}

Instance zeroSmallMeans(const Instance& instance, double eps, int supportBound,
                        TransformLog* log) {
  checkEps(eps);
  if (supportBound < 1) throw ValidationError("supportBound must be at least 1");
  const double floor = eps / (static_cast<double>(supportBound) * instance.size());
  Instance out = instance;
  int touched = 0;
  double moved = 0.0;
  for (auto& var : out.variables) {
    bool hit = false;
    std::map<double, double> mass;
    for (const auto& a : var.atoms) {
      if (a.value > 0.0 && a.value * a.prob <= floor) {
        mass[0.0] += a.prob;
        moved += a.prob;
        hit = true;
      } else {
        mass[a.value] += a.prob;
      }
    }
    if (hit) {
      var = fromMass(mass);
      ++touched;
    }
  }
  if (log)
    log->add({"zeroSmallMeans", touched, moved, 1.0 - 1.5 * supportBound * eps, 1.0});
  return out;
}

Instance bundleAboveOne(const Instance& instance, TransformLog* log) {
  Instance out = instance;
  int touched = 0;
  double moved = 0.0;
  for (auto& var : out.variables) {
    double massHigh = 0.0;
    double meanHigh = 0.0;
    int countHigh = 0;
    for (const auto& a : var.atoms) {
      if (a.value > 1.0) {
        massHigh += a.prob;
        meanHigh += a.value * a.prob;
        ++countHigh;
      }
    }
    if (countHigh < 2) continue;
    std::map<double, double> mass;
    for (const auto& a : var.atoms) {
      if (a.value <= 1.0) mass[a.value] += a.prob;
    }
    mass[meanHigh / massHigh] += massHigh;
    var = fromMass(mass);
    ++touched;
    moved += massHigh;
  }
  if (log) log->add({"bundleAboveOne", touched, moved, 1.0, 1.0});
  return out;
}

Instance compressHighValues(const Instance& instance, double eps, TransformLog* log) {
  checkEps(eps);
  const double high = 1.0 / (eps * eps);
  const double probCap = eps * eps;
  double vMax = 0.0;
  for (const auto& var : instance.variables) vMax = std::max(vMax, var.maxValue());

  Instance out = instance;
  int touched = 0;
  double moved = 0.0;
  int index = 0;
  for (auto& var : out.variables) {
    std::string where = "variable " + std::to_string(index++);
    int above1 = 0;
    for (const auto& a : var.atoms) {
      if (a.value > 1.0) ++above1;
      if (a.value > high && a.prob > probCap)
        throw PipelineError(where + ": atom (" + std::to_string(a.value) + ", " +
                            std::to_string(a.prob) +
                            ") has high value and non-small probability; such atoms cannot "
                            "survive on a normalized instance");
    }
    if (above1 > 1)
      throw PipelineError(where + ": " + std::to_string(above1) +
                          " atoms above 1; run bundleAboveOne first");
    bool hit = false;
    std::map<double, double> mass;
    for (const auto& a : var.atoms) {
      if (a.value >= high) {
        mass[vMax] += a.value * a.prob / vMax;
        moved += a.prob;
        hit = true;
      } else {
        mass[a.value] += a.prob;
      }
    }
    if (hit) {
      // The distribution lost probability mass on purpose: the replacement
      // preserves the expectation, not the mass. Pad with value 0.
      double total = 0.0;
      for (const auto& [v, p] : mass) total += p;
      if (total < 1.0) mass[0.0] += 1.0 - total;
      var = fromMass(mass);
      ++touched;
    }
  }
  if (log) log->add({"compressHighValues", touched, moved, 1.0, 1.0 + eps * eps});
  return out;
}

Instance zeroRareHighValues(const Instance& instance, double eps, TransformLog* log) {
  checkEps(eps);
  const double high = 1.0 / (eps * eps);
  const double floor = eps / instance.size();
  Instance out = instance;
  int touched = 0;
  double moved = 0.0;
  for (auto& var : out.variables) {
    bool hit = false;
    std::map<double, double> mass;
    for (const auto& a : var.atoms) {
      if (a.value >= high && a.prob < floor) {
        mass[0.0] += a.prob;
        moved += a.prob;
        hit = true;
      } else {
        mass[a.value] += a.prob;
      }
    }
    if (hit) {
      var = fromMass(mass);
      ++touched;
    }
  }
  if (log) log->add({"zeroRareHighValues", touched, moved, 1.0 - 1.5 * eps, 1.0});
  return out;
}

std::vector<std::vector<AtomCase>> classifyAtoms(const Instance& instance, double eps) {
  checkEps(eps);
  const double high = 1.0 / (eps * eps);
  const double probCap = eps * eps;
  const double probFloor = eps * eps * eps / instance.size();
  std::vector<std::vector<AtomCase>> out;
  out.reserve(instance.variables.size());
  for (const auto& var : instance.variables) {
    std::vector<AtomCase> cases;
    cases.reserve(var.atoms.size());
    for (const auto& a : var.atoms) {
      AtomCase c;
      if (a.value > high && a.prob > probCap) {
        c = AtomCase::Forbidden;
      } else if (a.value >= high && a.prob <= probCap) {
        c = AtomCase::Case2;
      } else if (a.value >= eps && a.prob >= probFloor) {
        c = AtomCase::Case1;
      } else {
        c = AtomCase::Preprocessing;
      }
      cases.push_back(c);
    }
    out.push_back(std::move(cases));
  }
  return out;
}

}  // namespace stopkit
