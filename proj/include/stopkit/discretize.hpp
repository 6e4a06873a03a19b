#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "stopkit/model.hpp"

namespace stopkit {

// Integer exponent k identifying (1+eps)^k, with a sentinel for exact zero.
// Grouping hashes these integers, never raw doubles.
struct PowerKey {
  bool isZero = false;
  std::int64_t exponent = 0;
  friend auto operator<=>(const PowerKey&, const PowerKey&) = default;
};

// Largest k with (1+eps)^k <= x. When x sits within 1e-12 relative error of
// the NEXT power boundary, that power is used, so values that are already
// powers of (1+eps) up to representation noise round to themselves.
// Throws ValidationError on x <= 0.
PowerKey roundDownToPower(double x, double eps);
double powerValue(std::int64_t exponent, double eps);

// Key of one discretized atom. High-value atoms (at the instance's top
// value) keep their exact value and carry the distinguished isVmax marker
// instead of a value exponent.
struct GroupAtomKey {
  bool isVmax = false;
  std::int64_t valueExp = 0;  // meaningless when isVmax
  std::int64_t probExp = 0;
  friend auto operator<=>(const GroupAtomKey&, const GroupAtomKey&) = default;
};

// Canonical identity of a discretized distribution: its sorted nonzero atom
// keys. Equal keys if and only if identical post-discretization
// distributions (the value-0 atom is determined by the rest).
struct GroupKey {
  std::vector<GroupAtomKey> atoms;
  std::string toString() const;  // "v{k|VMAX}p{k}[;...]"
  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
  friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

struct DiscretizeResult {
  Instance instance;
  std::vector<GroupKey> keys;  // one per variable
};

// Rounds a preprocessed instance onto the (1+eps) grid: ordinary atoms round
// value then probability down to powers of (1+eps); top-value atoms keep
// their value and round probability only. Atoms of one variable whose values
// land on the same power merge before the probability rounding. Probability
// mass lost to rounding joins the value-0 atom. Idempotent. Throws
// PipelineError when an atom classifies as Preprocessing or Forbidden
// (pipeline misuse).
DiscretizeResult discretizeInstance(const Instance& instance, double eps);

// The two halves as standalone transforms over ALL nonzero atoms (no case
// handling): value rounding merges collisions; probability rounding sends
// the deficit to the value-0 atom. Each changes the optimal value by a
// factor of at most 1+eps downward and never raises it.
Instance roundValuesToPowers(const Instance& instance, double eps);
Instance roundProbsToPowers(const Instance& instance, double eps);

struct GroupCountReport {
  int distinctGroups = 0;  // observed distinct GroupKeys
  int valueKeys = 0;       // distinct value keys (the top value counts once)
  int probKeys = 0;
  std::int64_t pairCount = 0;  // valueKeys * probKeys
  double bound = 0.0;          // pairCount^c / (c-1)!
  bool withinBound = false;
};

// Counts distinct groups of an already-discretized instance against the
// combinatorial ceiling for support sizes up to supportBound.
GroupCountReport countGroups(const Instance& discretized, double eps, int supportBound);

}  // namespace stopkit
