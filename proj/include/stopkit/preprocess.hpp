#pragma once

#include <string>
#include <vector>

#include "stopkit/model.hpp"

namespace stopkit {

struct TransformStep {
  std::string name;
  int variablesTouched = 0;
  double massMoved = 0.0;
  // Guaranteed fraction of the optimal value kept by this step (lower side)
  // and the factor it may inflate the value by (upper side).
  double lossLowerFactor = 1.0;
  double gainUpperFactor = 1.0;
};

struct TransformLog {
  std::vector<TransformStep> steps;
  void add(TransformStep step);
  double composedLowerFactor() const;
  double composedUpperFactor() const;
};

// All transforms below take a normalized instance (expected maximum 1), keep
// one distribution per input variable (zeroed atoms move their mass to the
// value-0 atom), and record what they touched in the optional log.

// Moves every atom with 0 < value < eps to value 0. Costs at most a
// 1.5*eps fraction of the optimal value.
Instance zeroSmallValues(const Instance& instance, double eps, TransformLog* log = nullptr);

// Moves every atom with value*prob <= eps / (supportBound * n) to value 0,
// where supportBound bounds the nonzero support size of any variable. Costs
// at most a 1.5*supportBound*eps fraction.
Instance zeroSmallMeans(const Instance& instance, double eps, int supportBound,
                        TransformLog* log = nullptr);

// Per variable, merges all mass above 1 into a single atom at the
// conditional mean E[X | X > 1]. Thresholds an optimal policy uses never
// exceed the optimal value, which is at most 1 here, so the stopping value
// is exactly unchanged. Run this before compressHighValues.
Instance bundleAboveOne(const Instance& instance, TransformLog* log = nullptr);

// Replaces every atom with value >= 1/eps^2 by the instance's top support
// value v_max with probability value*prob/v_max (expectation preserving).
// Requires at most one above-1 atom per variable (bundle first) and no atom
// with value > 1/eps^2 and prob > eps^2; throws PipelineError otherwise.
// Sandwich: OPT(X) <= OPT(Y) <= (1+eps^2) OPT(X).
Instance compressHighValues(const Instance& instance, double eps, TransformLog* log = nullptr);

// Companion step: zeroes high-value atoms (value >= 1/eps^2) whose
// probability fell below eps/n, so surviving top-value probabilities live in
// [eps/n, eps^2]. Kept separate from compressHighValues so the exact
// sandwich above stays testable on its own.
Instance zeroRareHighValues(const Instance& instance, double eps, TransformLog* log = nullptr);

// Where an atom lands in the value/probability plane for accuracy eps and
// instance size n:
//   Preprocessing: value < eps, or probability below the eps^3/n floor
//   Case1:         value in [eps, 1/eps^2], prob in [eps^3/n, 1]
//   Case2:         value >= 1/eps^2, prob <= eps^2
//   Forbidden:     value > 1/eps^2, prob > eps^2 (cannot survive on a
//                  normalized instance)
enum class AtomCase { Preprocessing, Case1, Case2, Forbidden };

std::vector<std::vector<AtomCase>> classifyAtoms(const Instance& instance, double eps);

}  // namespace stopkit
