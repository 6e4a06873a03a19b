#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stopkit/errors.hpp"

namespace stopkit {

// Probability bookkeeping slack: atom masses must sum to 1 within this.
inline constexpr double kMassTolerance = 1e-9;
// Comparison slack for quantities that are exact up to rounding noise.
inline constexpr double kValueTolerance = 1e-9;

// One support atom: the variable realizes `value` with probability `prob`.
struct PointMass {
  double value = 0.0;
  double prob = 0.0;
  friend bool operator==(const PointMass&, const PointMass&) = default;
};

// Finite nonnegative distribution stored as atoms sorted by strictly
// increasing value. Residual mass lives in an explicit value-0 atom, so the
// probabilities always sum to 1 up to kMassTolerance.
struct DiscreteDistribution {
  std::vector<PointMass> atoms;

  double mean() const;
  double maxValue() const;
  // P(X <= v), exact atom sum.
  double cdf(double v) const;
  // P(X > threshold).
  double massAbove(double threshold) const;
  // E[max(X, threshold)].
  double expectedMaxAgainst(double threshold) const;
  int nonzeroAtomCount() const;

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;
};

// Builds a distribution from unsorted mass: merges equal values, drops
// nonpositive masses, sorts. With padToOne, missing mass is added to a
// value-0 atom.
DiscreteDistribution makeDistribution(std::vector<PointMass> atoms, bool padToOne = false);

struct Instance {
  std::vector<DiscreteDistribution> variables;
  // Normalization factor applied so far; reported values times `scale` are in
  // the units of the original, unnormalized instance.
  double scale = 1.0;

  int size() const { return static_cast<int>(variables.size()); }
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
  std::string joined() const;
};

ValidationReport validate(const Instance& instance);
// Throws ValidationError carrying the full report when invalid.
void requireValid(const Instance& instance);

// E[max_i X_i], computed on the sorted union of support values. Throws
// LimitError when the union grid exceeds supportCap points.
double expectedMax(const Instance& instance, std::size_t supportCap = 1'000'000);

// Divides every support value by E[max_i X_i] so the normalized instance has
// expected maximum 1; the divisor is folded into `scale`.
Instance normalize(const Instance& instance);

// JSON instance files:
//   {"scale": 1.0, "variables": [{"atoms": [{"value": v, "prob": p}, ...]}, ...]}
// Atoms are sorted on load. Readers reject negative values, nonpositive or
// oversized probabilities, duplicate values, and mass deficits beyond
// kMassTolerance.
Instance readInstance(const std::string& path);
void writeInstance(const Instance& instance, const std::string& path);
Instance instanceFromJsonText(const std::string& text);
std::string instanceToJsonText(const Instance& instance);

enum class Profile { Desk, Theoretical };

// Accuracy parameter plus the exponent family the approximation scheme uses.
// Thresholds derived from them: small-probability cutoff eps^smallProbExp,
// ignorable class mass eps^ignoreMassExp, per-block mass eps^blockMassExp,
// and block count eps^-blockCountExp.
//
// The theoretical profile pins the exponents the analysis is stated with
// (20, 10, 4, 4); at executable scale those thresholds underflow any real
// instance, so the desk profile (2, 2, 1, 1) keeps every mechanism live.
// Reports always declare which profile produced them.
struct SchemeConfig {
  double epsilon = 0.2;
  double smallProbExp = 2.0;
  double ignoreMassExp = 2.0;
  double blockMassExp = 1.0;
  double blockCountExp = 1.0;
  Profile profile = Profile::Desk;

  static SchemeConfig desk(double epsilon);
  static SchemeConfig theoretical(double epsilon);

  void validate() const;  // throws ValidationError
  double smallProbThreshold() const;   // eps^smallProbExp
  double ignoreMassThreshold() const;  // eps^ignoreMassExp
  double highValueThreshold() const;   // 1/eps^2
  int blockCount() const;              // round(eps^-blockCountExp)
  const char* profileName() const;
};

}  // namespace stopkit
