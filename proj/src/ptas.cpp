#include "stopkit/ptas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "stopkit/rng.hpp"
#include "stopkit/simulate.hpp"

namespace stopkit {

double qTransform(double p) {
  if (!(p >= 0.0) || p >= 1.0)
    throw ValidationError("rate transform needs p in [0, 1), got " + std::to_string(p));
  return -std::log1p(-p);
}

double pTransform(double q) {
  if (!(q >= 0.0)) throw ValidationError("rate must be nonnegative");
  return -std::expm1(-q);
}

namespace {

// Rate with the deterministic endpoint allowed: a sure atom has infinite
// rate and is therefore never small.
double rateOf(double p) {
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return qTransform(p);
}

}  // namespace

SplitResult splitSmallSpecial(const Instance& discretized, const SchemeConfig& config) {
  config.validate();
  requireValid(discretized);
  const double eps = config.epsilon;
  const double high = config.highValueThreshold();

  SplitResult result;
  result.instance = discretized;

  double vMax = 0.0;
  for (const auto& var : discretized.variables) vMax = std::max(vMax, var.maxValue());
  result.vMax = vMax;
  for (const auto& var : discretized.variables) {
    for (const auto& a : var.atoms) {
      if (a.value == vMax && vMax > 0.0) result.qMax += rateOf(a.prob);
    }
  }

  // Distinct nonzero support values, ascending.
  std::set<double> values;
  for (const auto& var : discretized.variables) {
    for (const auto& a : var.atoms) {
      if (a.value > 0.0) values.insert(a.value);
    }
  }

  for (double v : values) {
    ValueClass cls;
    cls.value = v;
    cls.isVmax = v >= high;
    double cutoff = config.smallProbThreshold() * (cls.isVmax ? result.qMax : 1.0);
    for (int i = 0; i < discretized.size(); ++i) {
      for (const auto& a : discretized.variables[static_cast<std::size_t>(i)].atoms) {
        if (a.value != v) continue;
        double q = rateOf(a.prob);
        if (q < cutoff) {
          cls.smallAtoms.push_back({i, v, a.prob, q});
        } else {
          cls.specialVariables.push_back(i);
        }
      }
    }
    for (const auto& sa : cls.smallAtoms) cls.qBarStar += sa.q;

    double ignoreCut = config.ignoreMassThreshold() * (cls.isVmax ? result.qMax : 1.0);
    if (!cls.smallAtoms.empty() && cls.qBarStar < ignoreCut) {
      cls.ignored = true;
      for (const auto& sa : cls.smallAtoms) {
        auto& var = result.instance.variables[static_cast<std::size_t>(sa.variable)];
        std::map<double, double> mass;
        for (const auto& a : var.atoms) {
          if (a.value == v) {
            mass[0.0] += a.prob;
          } else {
            mass[a.value] += a.prob;
          }
        }
        DiscreteDistribution d;
        for (const auto& [val, p] : mass) {
          if (p > 0.0) d.atoms.push_back({val, p});
        }
        var = std::move(d);
      }
    } else if (!cls.smallAtoms.empty()) {
      cls.qStar = std::min(1.0 / eps, cls.qBarStar);
      cls.qOutside = std::pow(eps, config.blockMassExp) * cls.qStar;
      cls.delta = cls.qOutside / cls.qBarStar;
      cls.redrawProb = -std::expm1(-(1.0 - eps) * cls.qOutside);
      ++result.activeSmallClasses;
    }
    result.classes.push_back(std::move(cls));
  }
  return result;
}

Truncation specialTruncation(const DiscreteDistribution& variable, const SchemeConfig& config,
                             double qMax) {
  config.validate();
  const double high = config.highValueThreshold();
  Truncation out;
  double removed = 0.0;
  std::map<double, double> keep;
  for (const auto& a : variable.atoms) {
    if (a.value == 0.0) {
      keep[0.0] += a.prob;
      continue;
    }
    bool isVmax = a.value >= high;
    double cutoff = config.smallProbThreshold() * (isVmax ? qMax : 1.0);
    if (rateOf(a.prob) < cutoff) {
      DiscreteDistribution binary;
      if (a.prob < 1.0) binary.atoms.push_back({0.0, 1.0 - a.prob});
      binary.atoms.push_back({a.value, a.prob});
      out.binaries.push_back(std::move(binary));
      out.binaryValues.push_back(a.value);
      removed += a.prob;
    } else {
      keep[a.value] += a.prob;
    }
  }
  if (removed > 0.0) keep[0.0] += removed;
  for (const auto& [v, p] : keep) {
    if (p > 0.0) out.truncated.atoms.push_back({v, p});
  }
  return out;
}

int ClassLayout::blockOf(int pos) const {
  if (pos <= b0End || blockLen == 0) return 0;
  int k = 1 + (pos - b0End - 1) / blockLen;
  return std::min(k, blockCount);
}

BlockLayout buildBlocks(int n, const SplitResult& split, const SchemeConfig& config) {
  config.validate();
  if (n < 1) throw ValidationError("layout needs at least one arrival position");
  BlockLayout layout;
  layout.n = n;
  for (std::size_t ci = 0; ci < split.classes.size(); ++ci) {
    const ValueClass& cls = split.classes[ci];
    if (cls.ignored || cls.smallAtoms.empty()) continue;
    ClassLayout cl;
    cl.classIndex = static_cast<int>(ci);
    cl.value = cls.value;
    cl.blockCount = config.blockCount();
    int len = static_cast<int>(std::floor(cls.delta * n));
    // Never let the numbered blocks outgrow the horizon; the remainder stays
    // in the prefix.
    len = std::min(len, n / cl.blockCount);
    cl.blockLen = len;
    cl.degenerate = len < 1;
    cl.b0End = cl.degenerate ? n : n - cl.blockCount * len;
    cl.redrawProb = cls.redrawProb;
    if (!cl.degenerate) layout.classes.push_back(cl);
  }
  if (layout.classes.size() > 20)
    throw LimitError("more than 20 active frontloading classes");
  return layout;
}

namespace {

// Distributions already discretized: exact comparison is the right equality.
std::vector<std::pair<double, double>> distKey(const DiscreteDistribution& d) {
  std::vector<std::pair<double, double>> key;
  key.reserve(d.atoms.size());
  for (const auto& a : d.atoms) key.emplace_back(a.value, a.prob);
  return key;
}

}  // namespace

G5Solver::G5Solver(const SplitResult& split, const BlockLayout& layout,
                   const SchemeConfig& config, std::int64_t stateCap)
    : n_(split.instance.size()), layout_(layout) {
  config.validate();
  if (layout_.n != n_) throw ValidationError("layout built for a different instance size");

  // Extraction set via the split's own bookkeeping, so the walked variables
  // are exactly the truncated remainders of the active classes.
  std::set<std::pair<int, double>> extracted;
  for (const auto& cl : layout_.classes) {
    const ValueClass& cls = split.classes[static_cast<std::size_t>(cl.classIndex)];
    for (const auto& sa : cls.smallAtoms) extracted.insert({sa.variable, sa.value});
  }

  classOf_.resize(static_cast<std::size_t>(n_));
  std::map<std::vector<std::pair<double, double>>, int> seen;
  for (int i = 0; i < n_; ++i) {
    const auto& var = split.instance.variables[static_cast<std::size_t>(i)];
    std::map<double, double> keep;
    double removed = 0.0;
    for (const auto& a : var.atoms) {
      if (a.value > 0.0 && extracted.count({i, a.value})) {
        removed += a.prob;
      } else {
        keep[a.value] += a.prob;
      }
    }
    if (removed > 0.0) keep[0.0] += removed;
    DiscreteDistribution trunc;
    for (const auto& [v, p] : keep) {
      if (p > 0.0) trunc.atoms.push_back({v, p});
    }
    auto [it, inserted] = seen.emplace(distKey(trunc), static_cast<int>(reps_.size()));
    if (inserted) {
      reps_.push_back(std::move(trunc));
      fullCounts_.push_back(1);
    } else {
      ++fullCounts_[static_cast<std::size_t>(it->second)];
    }
    classOf_[static_cast<std::size_t>(i)] = it->second;
  }

  strides_.resize(reps_.size());
  stateCount_ = 1;
  for (std::size_t c = 0; c < reps_.size(); ++c) {
    strides_[c] = stateCount_;
    stateCount_ *= fullCounts_[c] + 1;
  }
  const int m = static_cast<int>(layout_.classes.size());
  if (stateCount_ > (stateCap >> m))
    throw LimitError("frontloaded solve needs " + std::to_string(stateCount_ << m) +
                     " states, over the cap of " + std::to_string(stateCap));

  crossMask_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int pos = 1; pos < n_; ++pos) {
    std::uint32_t mask = 0;
    for (int b = 0; b < m; ++b) {
      if (layout_.classes[static_cast<std::size_t>(b)].blockOf(pos) !=
          layout_.classes[static_cast<std::size_t>(b)].blockOf(pos + 1))
        mask |= std::uint32_t{1} << b;
    }
    crossMask_[static_cast<std::size_t>(pos)] = mask;
  }
  initialMask_ = 0;
  rho_.resize(layout_.classes.size());
  for (int b = 0; b < m; ++b) {
    rho_[static_cast<std::size_t>(b)] = layout_.classes[static_cast<std::size_t>(b)].redrawProb;
    if (layout_.classes[static_cast<std::size_t>(b)].blockOf(1) >= 1)
      initialMask_ |= std::uint32_t{1} << b;
  }

  memo_.assign(static_cast<std::size_t>(stateCount_) << m, 0.0);
  known_.assign(static_cast<std::size_t>(stateCount_) << m, 0);

  // Root value: expectation over the draws of options whose first block
  // already covers position 1.
  std::int64_t fullIdx = stateCount_ - 1;
  double v = 0.0;
  std::uint32_t s = initialMask_;
  while (true) {
    double prob = 1.0;
    for (int b = 0; b < m; ++b) {
      if (!(initialMask_ & (std::uint32_t{1} << b))) continue;
      prob *= (s & (std::uint32_t{1} << b)) ? rho_[static_cast<std::size_t>(b)]
                                            : 1.0 - rho_[static_cast<std::size_t>(b)];
    }
    v += prob * opt(fullIdx, s, n_);
    if (s == 0) break;
    s = (s - 1) & initialMask_;
  }
  value_ = v;
}

double G5Solver::opt(std::int64_t stateIdx, std::uint32_t zmask, int remaining) const {
  if (remaining == 0) return 0.0;
  const int m = static_cast<int>(layout_.classes.size());
  std::size_t key = (static_cast<std::size_t>(stateIdx) << m) | zmask;
  if (known_[key]) return memo_[key];

  const int pos = n_ - remaining + 1;
  double zbest = 0.0;
  for (int b = 0; b < m; ++b) {
    if (zmask & (std::uint32_t{1} << b))
      zbest = std::max(zbest, layout_.classes[static_cast<std::size_t>(b)].value);
  }

  double acc = 0.0;
  for (std::size_t c = 0; c < reps_.size(); ++c) {
    int digit = static_cast<int>((stateIdx / strides_[c]) % (fullCounts_[c] + 1));
    if (digit == 0) continue;
    double cont = continuationIdx(stateIdx - strides_[c], zmask, remaining - 1, pos);
    double floor = std::max(zbest, cont);
    double e = 0.0;
    for (const auto& a : reps_[c].atoms) e += a.prob * std::max(a.value, floor);
    acc += static_cast<double>(digit) / remaining * e;
  }
  memo_[key] = acc;
  known_[key] = 1;
  return acc;
}

double G5Solver::continuationIdx(std::int64_t stateIdx, std::uint32_t zmask, int remaining,
                                 int pos) const {
  if (remaining == 0) return 0.0;
  const int m = static_cast<int>(layout_.classes.size());
  std::uint32_t cm = crossMask_[static_cast<std::size_t>(pos)];
  std::uint32_t base = zmask & ~cm;
  if (cm == 0) return opt(stateIdx, base, remaining);
  double v = 0.0;
  std::uint32_t s = cm;
  while (true) {
    double prob = 1.0;
    for (int b = 0; b < m; ++b) {
      if (!(cm & (std::uint32_t{1} << b))) continue;
      prob *= (s & (std::uint32_t{1} << b)) ? rho_[static_cast<std::size_t>(b)]
                                            : 1.0 - rho_[static_cast<std::size_t>(b)];
    }
    v += prob * opt(stateIdx, base | s, remaining);
    if (s == 0) break;
    s = (s - 1) & cm;
  }
  return v;
}

std::int64_t G5Solver::indexOfCounts(const std::vector<int>& counts) const {
  if (counts.size() != reps_.size())
    throw ValidationError("count vector has " + std::to_string(counts.size()) +
                          " entries, expected " + std::to_string(reps_.size()));
  std::int64_t idx = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 0 || counts[c] > fullCounts_[c])
      throw ValidationError("count out of range for truncated class " + std::to_string(c));
    idx += strides_[c] * counts[c];
  }
  return idx;
}

double G5Solver::continuationAfter(const std::vector<int>& remainingCounts, std::uint32_t zmask,
                                   int pos) const {
  int remaining = 0;
  for (int c : remainingCounts) remaining += c;
  if (remaining == 0) return 0.0;
  if (pos != n_ - remaining)
    throw ValidationError("position " + std::to_string(pos) + " inconsistent with " +
                          std::to_string(remaining) + " remaining of " + std::to_string(n_));
  return continuationIdx(indexOfCounts(remainingCounts), zmask, remaining, pos);
}

double G5Solver::continuationAfterVars(const std::vector<int>& remainingVars,
                                       std::uint32_t zmask) const {
  if (remainingVars.empty()) return 0.0;
  std::vector<int> counts(reps_.size(), 0);
  for (int v : remainingVars) ++counts[static_cast<std::size_t>(classOf_[static_cast<std::size_t>(v)])];
  int remaining = static_cast<int>(remainingVars.size());
  return continuationIdx(indexOfCounts(counts), zmask, remaining, n_ - remaining);
}

G5Result solveG5(const SplitResult& split, const BlockLayout& layout, const SchemeConfig& config,
                 std::int64_t stateCap) {
  G5Result result;
  result.solver = std::make_shared<const G5Solver>(split, layout, config, stateCap);
  result.value = result.solver->value();
  return result;
}

PtasResult solvePtas(const Instance& instance, const SchemeConfig& config) {
  PtasResult result;
  result.config = config;
  result.pipeline = runQptasPipeline(instance, config);
  result.normFactor = result.pipeline.normFactor;
  result.split = splitSmallSpecial(result.pipeline.discretized, config);
  double ignoredMass = 0.0;
  std::set<int> ignoredVars;
  for (const auto& cls : result.split.classes) {
    if (!cls.ignored) continue;
    for (const auto& sa : cls.smallAtoms) {
      ignoredMass += sa.prob;
      ignoredVars.insert(sa.variable);
    }
  }
  result.log = result.pipeline.log;
  if (!ignoredVars.empty())
    result.log.add(
        {"ignoreSmallClasses", static_cast<int>(ignoredVars.size()), ignoredMass, 1.0, 1.0});
  result.layout = buildBlocks(result.split.instance.size(), result.split, config);
  result.g5 = solveG5(result.split, result.layout, config);
  result.value = result.g5.value * result.normFactor;
  return result;
}

Strategy ptasStrategy(const PtasResult& result) {
  auto solver = result.g5.solver;
  double scaleBack = result.normFactor;
  return strategyFromOracle("ptas", [solver, scaleBack](const std::vector<int>& remaining) {
    return solver->continuationAfterVars(remaining, 0) * scaleBack;
  });
}

namespace {

struct GameStats {
  GameEstimate estimate(int trials) const {
    GameEstimate e;
    e.mean = pairwiseSum(rewards) / trials;
    if (trials > 1) {
      std::vector<double> sq(rewards.size());
      for (std::size_t i = 0; i < rewards.size(); ++i) {
        double d = rewards[i] - e.mean;
        sq[i] = d * d;
      }
      e.sem = std::sqrt(pairwiseSum(sq) / (trials - 1) / trials);
    }
    return e;
  }
  std::vector<double> rewards;
};

}  // namespace

GameChainReport simulateGameChain(const SplitResult& split, const BlockLayout& layout,
                                  const SchemeConfig& config, const G5Result& g5, int trials,
                                  std::uint64_t seed) {
  config.validate();
  if (trials < 1) throw ValidationError("trials must be positive");
  const G5Solver& solver = *g5.solver;
  const Instance& inst = split.instance;
  const int n = inst.size();
  const double eps = config.epsilon;
  const int m = static_cast<int>(layout.classes.size());

  // Per-variable small pieces of active classes, ordered by value; each entry
  // is (layout class, value, prob).
  struct SmallPiece {
    int layoutClass;
    double value;
    double prob;
  };
  std::vector<std::vector<SmallPiece>> pieces(static_cast<std::size_t>(n));
  // Per layout class: (variable, rate) members for the failure sums.
  std::vector<std::vector<std::pair<int, double>>> members(static_cast<std::size_t>(m));
  for (int b = 0; b < m; ++b) {
    const ClassLayout& cl = layout.classes[static_cast<std::size_t>(b)];
    const ValueClass& cls = split.classes[static_cast<std::size_t>(cl.classIndex)];
    for (const auto& sa : cls.smallAtoms) {
      pieces[static_cast<std::size_t>(sa.variable)].push_back({b, sa.value, sa.prob});
      members[static_cast<std::size_t>(b)].push_back({sa.variable, sa.q});
    }
  }
  for (auto& list : pieces)
    std::sort(list.begin(), list.end(),
              [](const SmallPiece& a, const SmallPiece& b) { return a.value < b.value; });

  GameStats s1, s2, s3, s3star, s4, s5;
  s1.rewards.resize(static_cast<std::size_t>(trials));
  s2.rewards.resize(static_cast<std::size_t>(trials));
  s3.rewards.resize(static_cast<std::size_t>(trials));
  s3star.rewards.resize(static_cast<std::size_t>(trials));
  s4.rewards.resize(static_cast<std::size_t>(trials));
  s5.rewards.resize(static_cast<std::size_t>(trials));
  std::vector<double> failures(static_cast<std::size_t>(trials), 0.0);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<int> posOf(static_cast<std::size_t>(n));
  std::vector<double> x1(static_cast<std::size_t>(n));
  std::vector<double> xT(static_cast<std::size_t>(n));
  std::vector<std::vector<char>> bern(static_cast<std::size_t>(n));
  const int blockCount = m > 0 ? layout.classes[0].blockCount : 0;
  std::vector<std::vector<char>> z4(static_cast<std::size_t>(m)),
      z5(static_cast<std::size_t>(m));
  std::vector<int> counts;

  for (int trial = 0; trial < trials; ++trial) {
    std::uint64_t b = static_cast<std::uint64_t>(trial) * 8;
    SplitMix64 permRng = SplitMix64::stream(seed, b);
    SplitMix64 drawRng = SplitMix64::stream(seed, b + 1);
    SplitMix64 bundleRng = SplitMix64::stream(seed, b + 2);
    SplitMix64 truncRng = SplitMix64::stream(seed, b + 3);
    SplitMix64 zRng = SplitMix64::stream(seed, b + 4);

    std::iota(order.begin(), order.end(), 0);
    fisherYates(order, permRng);
    for (int t = 0; t < n; ++t) posOf[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = t + 1;

    // Failure event: any numbered block whose member rate sum strays more
    // than eps from the class block target.
    bool failure = false;
    for (int bIdx = 0; bIdx < m; ++bIdx) {
      const ClassLayout& cl = layout.classes[static_cast<std::size_t>(bIdx)];
      const ValueClass& cls = split.classes[static_cast<std::size_t>(cl.classIndex)];
      std::vector<double> qsum(static_cast<std::size_t>(cl.blockCount) + 1, 0.0);
      for (const auto& [vi, q] : members[static_cast<std::size_t>(bIdx)])
        qsum[static_cast<std::size_t>(cl.blockOf(posOf[static_cast<std::size_t>(vi)]))] += q;
      for (int k = 1; k <= cl.blockCount; ++k) {
        if (qsum[static_cast<std::size_t>(k)] < (1.0 - eps) * cls.qOutside ||
            qsum[static_cast<std::size_t>(k)] > (1.0 + eps) * cls.qOutside) {
          failure = true;
          break;
        }
      }
      if (failure) break;
    }
    failures[static_cast<std::size_t>(trial)] = failure ? 1.0 : 0.0;

    // All draws upfront, in index order, so every game walks deterministic
    // shared randomness.
    for (int i = 0; i < n; ++i) {
      x1[static_cast<std::size_t>(i)] =
          sampleRealization(inst.variables[static_cast<std::size_t>(i)], drawRng);
      auto& flags = bern[static_cast<std::size_t>(i)];
      flags.assign(pieces[static_cast<std::size_t>(i)].size(), 0);
      for (std::size_t p = 0; p < flags.size(); ++p)
        flags[p] = bundleRng.nextDouble() < pieces[static_cast<std::size_t>(i)][p].prob ? 1 : 0;
      xT[static_cast<std::size_t>(i)] = sampleRealization(
          solver.truncatedRep(solver.truncClassOf(i)), truncRng);
    }
    for (int bIdx = 0; bIdx < m; ++bIdx) {
      z5[static_cast<std::size_t>(bIdx)].assign(static_cast<std::size_t>(blockCount) + 1, 0);
      z4[static_cast<std::size_t>(bIdx)].assign(static_cast<std::size_t>(blockCount) + 1, 0);
      for (int k = 1; k <= blockCount; ++k)
        z5[static_cast<std::size_t>(bIdx)][static_cast<std::size_t>(k)] =
            zRng.nextDouble() < layout.classes[static_cast<std::size_t>(bIdx)].redrawProb ? 1 : 0;
    }
    for (int i = 0; i < n; ++i) {
      const auto& list = pieces[static_cast<std::size_t>(i)];
      for (std::size_t p = 0; p < list.size(); ++p) {
        if (!bern[static_cast<std::size_t>(i)][p]) continue;
        const ClassLayout& cl = layout.classes[static_cast<std::size_t>(list[p].layoutClass)];
        int k = cl.blockOf(posOf[static_cast<std::size_t>(i)]);
        if (k >= 1) z4[static_cast<std::size_t>(list[p].layoutClass)][static_cast<std::size_t>(k)] = 1;
      }
    }

    auto thresholdAt = [&](int pos, std::uint32_t zmask) {
      return solver.continuationAfter(counts, zmask, pos);
    };
    auto resetCounts = [&]() { counts = solver.fullCounts(); };
    auto consume = [&](int i) { --counts[static_cast<std::size_t>(solver.truncClassOf(i))]; };

    // Original game.
    double r1 = 0.0;
    resetCounts();
    for (int t = 1; t <= n; ++t) {
      int i = order[static_cast<std::size_t>(t - 1)];
      consume(i);
      if (x1[static_cast<std::size_t>(i)] >= thresholdAt(t, 0)) {
        r1 = x1[static_cast<std::size_t>(i)];
        break;
      }
    }
    s1.rewards[static_cast<std::size_t>(trial)] = r1;
    s2.rewards[static_cast<std::size_t>(trial)] = failure ? 0.0 : r1;

    // Prefix removal: a small realization whose variable sits in the class
    // prefix cannot be taken.
    double r3 = 0.0;
    resetCounts();
    for (int t = 1; t <= n; ++t) {
      int i = order[static_cast<std::size_t>(t - 1)];
      consume(i);
      double x = x1[static_cast<std::size_t>(i)];
      for (const auto& piece : pieces[static_cast<std::size_t>(i)]) {
        if (x == piece.value &&
            layout.classes[static_cast<std::size_t>(piece.layoutClass)].blockOf(t) == 0) {
          x = 0.0;
          break;
        }
      }
      if (x >= thresholdAt(t, 0)) {
        r3 = x;
        break;
      }
    }
    s3.rewards[static_cast<std::size_t>(trial)] = failure ? 0.0 : r3;

    // Split arrival: the small pieces and the truncated remainder arrive
    // together and share the position's threshold; the offer is the best
    // live piece. Prefix removal carries over to the pieces.
    double r3s = 0.0;
    resetCounts();
    for (int t = 1; t <= n; ++t) {
      int i = order[static_cast<std::size_t>(t - 1)];
      consume(i);
      double offer = xT[static_cast<std::size_t>(i)];
      const auto& list = pieces[static_cast<std::size_t>(i)];
      for (std::size_t p = 0; p < list.size(); ++p) {
        if (!bern[static_cast<std::size_t>(i)][p]) continue;
        if (layout.classes[static_cast<std::size_t>(list[p].layoutClass)].blockOf(t) == 0)
          continue;
        offer = std::max(offer, list[p].value);
      }
      if (offer >= thresholdAt(t, 0)) {
        r3s = offer;
        break;
      }
    }
    s3star.rewards[static_cast<std::size_t>(trial)] = failure ? 0.0 : r3s;

    // Frontloaded games: walk truncated arrivals against outside options.
    auto playFrontloaded = [&](const std::vector<std::vector<char>>& zdraw) {
      resetCounts();
      for (int t = 1; t <= n; ++t) {
        int i = order[static_cast<std::size_t>(t - 1)];
        consume(i);
        std::uint32_t zmask = 0;
        double zbest = 0.0;
        for (int bIdx = 0; bIdx < m; ++bIdx) {
          int k = layout.classes[static_cast<std::size_t>(bIdx)].blockOf(t);
          if (k >= 1 && zdraw[static_cast<std::size_t>(bIdx)][static_cast<std::size_t>(k)]) {
            zmask |= std::uint32_t{1} << bIdx;
            zbest = std::max(zbest, layout.classes[static_cast<std::size_t>(bIdx)].value);
          }
        }
        double offer = std::max(xT[static_cast<std::size_t>(i)], zbest);
        if (offer >= thresholdAt(t, zmask)) return offer;
      }
      return 0.0;
    };
    double r4 = playFrontloaded(z4);
    double r5 = playFrontloaded(z5);
    s4.rewards[static_cast<std::size_t>(trial)] = failure ? 0.0 : r4;
    s5.rewards[static_cast<std::size_t>(trial)] = failure ? 0.0 : r5;
  }

  GameChainReport report;
  report.trials = trials;
  report.seed = seed;
  report.g5SolverValue = g5.value;
  report.g1 = s1.estimate(trials);
  report.g2 = s2.estimate(trials);
  report.g3 = s3.estimate(trials);
  report.g3star = s3star.estimate(trials);
  report.g4 = s4.estimate(trials);
  report.g5 = s5.estimate(trials);
  report.failureRate = pairwiseSum(failures) / trials;
  if (trials > 1) {
    double p = report.failureRate;
    report.failureSem = std::sqrt(p * (1.0 - p) / trials);
  }
  report.rewards1 = std::move(s1.rewards);
  report.rewards2 = std::move(s2.rewards);
  report.rewards3 = std::move(s3.rewards);
  report.rewards3star = std::move(s3star.rewards);
  report.rewards4 = std::move(s4.rewards);
  report.rewards5 = std::move(s5.rewards);
  return report;
}

}  // namespace stopkit
