#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "stopkit/model.hpp"
#include "stopkit/qptas.hpp"

namespace stopkit {

// Exponential-clock rate of a probability: q = -ln(1-p). Rates of
// independent events add, which is what the block accounting below relies
// on. Throws ValidationError outside [0, 1).
double qTransform(double p);
// Inverse: p = 1 - exp(-q).
double pTransform(double q);

// One small-probability atom pulled out of a variable: `variable` realizes
// `value` with probability `prob` (rate q).
struct SmallAtom {
  int variable = -1;
  double value = 0.0;
  double prob = 0.0;
  double q = 0.0;
};

// Per support value: the atoms whose rate is below the smallness cutoff
// (eps^smallProbExp, scaled by the total top-value rate for the top-value
// class) and the block-mass quantities derived from them.
struct ValueClass {
  double value = 0.0;
  bool isVmax = false;
  std::vector<SmallAtom> smallAtoms;
  std::vector<int> specialVariables;  // variables keeping a large atom here
  double qBarStar = 0.0;   // total small rate at this value
  double qStar = 0.0;      // min(1/eps, qBarStar)
  double qOutside = 0.0;   // eps^blockMassExp * qStar, target rate per block
  double delta = 0.0;      // qOutside / qBarStar, block length fraction
  double redrawProb = 0.0; // 1 - exp(-(1-eps) * qOutside)
  bool ignored = false;    // small mass zeroed because qBarStar was negligible
};

struct SplitResult {
  // Input with the small mass of ignored classes moved to value 0.
  Instance instance;
  std::vector<ValueClass> classes;  // one per distinct nonzero support value
  double qMax = 0.0;  // total rate at the top value, across all variables
  double vMax = 0.0;
  int activeSmallClasses = 0;  // classes with a surviving nonempty small set
};

// Splits every support value's atoms into small and special by rate, and
// zeroes the small mass of values whose total small rate is negligible
// (below eps^ignoreMassExp, scaled by qMax for the top-value class).
// Expects a discretized instance.
SplitResult splitSmallSpecial(const Instance& discretized, const SchemeConfig& config);

// One variable split for consecutive arrival: a standalone two-point
// variable per small atom plus the truncated remainder holding the large
// atoms. The maximum over the pieces is stochastically dominated by the
// original variable.
struct Truncation {
  std::vector<DiscreteDistribution> binaries;  // ordered by value
  std::vector<double> binaryValues;
  DiscreteDistribution truncated;
};
Truncation specialTruncation(const DiscreteDistribution& variable, const SchemeConfig& config,
                             double qMax = 0.0);

// Arrival positions 1..n cut into a prefix B_0 and blockCount equal blocks
// per active value class. Small realizations are suppressed in B_0 and
// frontloaded as an outside option inside each later block.
struct ClassLayout {
  int classIndex = -1;  // into SplitResult::classes
  double value = 0.0;
  int blockCount = 0;   // K
  int blockLen = 0;     // positions per numbered block
  int b0End = 0;        // last position of B_0 (0 when empty)
  bool degenerate = false;  // delta * n < 1: blocks cannot be formed at this n
  double redrawProb = 0.0;
  // 0 for B_0, else 1..K.
  int blockOf(int pos) const;
};

struct BlockLayout {
  int n = 0;
  std::vector<ClassLayout> classes;  // active classes only
};

BlockLayout buildBlocks(int n, const SplitResult& split, const SchemeConfig& config);

// Stopping game with frontloaded small mass: walked arrivals carry the
// truncated variables only; each active value v maintains an outside option
// Z_v that is redrawn as {v with the class redraw probability, else 0} at
// every numbered-block boundary, is worth 0 inside B_0, and expires at the
// block end. State: counts of remaining truncated classes plus the Z bit
// vector; the arrival position is implied by the counts.
class G5Solver {
 public:
  G5Solver(const SplitResult& split, const BlockLayout& layout, const SchemeConfig& config,
           std::int64_t stateCap);

  double value() const { return value_; }
  int bundleCount() const { return n_; }
  int truncClassCount() const { return static_cast<int>(reps_.size()); }
  int truncClassOf(int variable) const { return classOf_[static_cast<std::size_t>(variable)]; }
  const std::vector<int>& fullCounts() const { return fullCounts_; }
  const DiscreteDistribution& truncatedRep(int truncClass) const {
    return reps_[static_cast<std::size_t>(truncClass)];
  }
  int layoutClassCount() const { return static_cast<int>(layout_.classes.size()); }
  const BlockLayout& layout() const { return layout_; }

  // Expected value of declining the arrival at position pos, given the
  // remaining class counts and the currently live outside options (bit i of
  // zmask = layout class i holds its value). Averages over the boundary
  // redraws between pos and pos+1.
  double continuationAfter(const std::vector<int>& remainingCounts, std::uint32_t zmask,
                           int pos) const;
  // Same, keyed by remaining variable indices.
  double continuationAfterVars(const std::vector<int>& remainingVars, std::uint32_t zmask) const;

 private:
  double opt(std::int64_t stateIdx, std::uint32_t zmask, int remaining) const;
  double continuationIdx(std::int64_t stateIdx, std::uint32_t zmask, int remaining,
                         int pos) const;
  std::int64_t indexOfCounts(const std::vector<int>& counts) const;

  int n_ = 0;
  BlockLayout layout_;
  std::vector<DiscreteDistribution> reps_;
  std::vector<int> fullCounts_;
  std::vector<int> classOf_;
  std::vector<std::int64_t> strides_;
  std::int64_t stateCount_ = 0;
  std::vector<std::uint32_t> crossMask_;  // boundary between pos and pos+1
  std::uint32_t initialMask_ = 0;         // classes whose first block covers position 1
  std::vector<double> rho_;
  double value_ = 0.0;
  mutable std::vector<double> memo_;
  mutable std::vector<char> known_;
};

struct G5Result {
  double value = 0.0;
  std::shared_ptr<const G5Solver> solver;
};

G5Result solveG5(const SplitResult& split, const BlockLayout& layout, const SchemeConfig& config,
                 std::int64_t stateCap = 50'000'000);

// Full approximation pipeline: preparation, small/special split, block
// layout, frontloaded solve. `value` is in input units.
struct PtasResult {
  double value = 0.0;
  double normFactor = 1.0;
  TransformLog log;
  SchemeConfig config;
  PipelineResult pipeline;
  SplitResult split;
  BlockLayout layout;
  G5Result g5;
};

PtasResult solvePtas(const Instance& instance, const SchemeConfig& config);

// Threshold strategy for plain stopping play backed by the frontloaded
// solver's value table (outside options treated as absent).
Strategy ptasStrategy(const PtasResult& result);

// Monte-Carlo estimates of the game chain that links the original stopping
// game to the frontloaded one, every game played with the solver's
// thresholds under its own rules:
//   g1     original game on the split instance
//   g2     g1 with the reward zeroed when any numbered block's small rate
//          strays more than eps from its target (the failure event)
//   g3     g2 with small realizations suppressed in B_0
//   g3star g3 with each variable split into consecutively arriving pieces
//   g4     g3star with in-block small realizations frontloaded as outside
//          options drawn from the actual block membership
//   g5     g4 with the outside-option draw probability fixed at the class
//          redraw probability
struct GameEstimate {
  double mean = 0.0;
  double sem = 0.0;  // sample std / sqrt(trials)
};

struct GameChainReport {
  GameEstimate g1, g2, g3, g3star, g4, g5;
  double failureRate = 0.0;
  double failureSem = 0.0;
  double g5SolverValue = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  // Per-trial rewards, index-aligned across games (shared arrival order and
  // coupled draws where the games share structure), for paired comparisons.
  std::vector<double> rewards1, rewards2, rewards3, rewards3star, rewards4, rewards5;
};

GameChainReport simulateGameChain(const SplitResult& split, const BlockLayout& layout,
                                  const SchemeConfig& config, const G5Result& g5, int trials,
                                  std::uint64_t seed);

}  // namespace stopkit
