#include "stopkit/checks.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include "stopkit/discretize.hpp"
#include "stopkit/exact_dp.hpp"
#include "stopkit/gen.hpp"
#include "stopkit/grouped_dp.hpp"
#include "stopkit/preprocess.hpp"
#include "stopkit/ptas.hpp"
#include "stopkit/qptas.hpp"
#include "stopkit/rng.hpp"
#include "stopkit/simulate.hpp"

namespace stopkit::checks {

namespace {

constexpr double kTolExact = 1e-12;
constexpr double kTolNumeric = 1e-9;
// Best known uniform guarantee of the stopping value against the full-
// information maximum on normalized instances; used as a sanity floor only.
constexpr double kKnownRatioFloor = 0.669;

std::string str(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

void addCase(SuiteReport& report, const std::string& label, bool pass,
             const std::string& detail) {
  report.cases.push_back({label, pass, detail});
}

// Mean and 1-sem of a per-trial sample, pairwise-summed like the simulator.
struct Paired {
  double mean = 0.0;
  double sem = 0.0;
};

Paired pairedStats(const std::vector<double>& sample) {
  Paired out;
  const int trials = static_cast<int>(sample.size());
  out.mean = pairwiseSum(sample) / trials;
  if (trials > 1) {
    std::vector<double> sq(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      double d = sample[i] - out.mean;
      sq[i] = d * d;
    }
    out.sem = std::sqrt(pairwiseSum(sq) / (trials - 1) / trials);
  }
  return out;
}

// Stats of a*x - b*y over coupled trials.
Paired pairedDiff(const std::vector<double>& x, double a, const std::vector<double>& y,
                  double b) {
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = a * x[i] - b * y[i];
  return pairedStats(d);
}

}  // namespace

int SuiteReport::failures() const {
  int n = 0;
  for (const auto& c : cases) {
    if (!c.pass) ++n;
  }
  return n;
}

std::string SuiteReport::summary() const {
  std::ostringstream out;
  out << suite << ": " << (cases.size() - static_cast<std::size_t>(failures())) << "/"
      << cases.size() << " cases passed";
  if (failures() > 0) {
    out << "; first failure: ";
    for (const auto& c : cases) {
      if (!c.pass) {
        out << c.label << " (" << c.detail << ")";
        break;
      }
    }
  }
  return out.str();
}

SuiteReport counterexample() {
  SuiteReport report;
  report.suite = "counterexample";

  Instance pair = gen::counterexamplePair();
  const DiscreteDistribution& xa = pair.variables[0];
  const DiscreteDistribution& xb = pair.variables[1];

  double meanA = xa.mean();
  double meanB = xb.mean();
  double varA = 0.0, varB = 0.0;
  for (const auto& a : xa.atoms) varA += a.prob * (a.value - meanA) * (a.value - meanA);
  for (const auto& a : xb.atoms) varB += a.prob * (a.value - meanB) * (a.value - meanB);
  addCase(report, "means match", std::abs(meanA - meanB) <= kTolExact,
          "meanA=" + str(meanA) + " meanB=" + str(meanB));
  addCase(report, "variances match", std::abs(varA - varB) <= kTolExact,
          "varA=" + str(varA) + " varB=" + str(varB));

  Instance inst = pair;
  inst.variables.push_back(makeDistribution({{0.5, 1.0}}));
  DpValue dp = solveExact(inst);
  SubsetMask maskD = 1u << 2;
  double thetaD = dp.thresholdAt(maskD);
  addCase(report, "deterministic companion threshold", std::abs(thetaD - 0.5) <= kTolExact,
          "theta={D}=" + str(thetaD));

  double contA = continuationValue(inst, dp, 0, maskD);
  double contB = continuationValue(inst, dp, 1, maskD);
  addCase(report, "golden continuation first variable", std::abs(contA - 0.625) <= kTolExact,
          "E[max(A,1/2)]=" + str(contA) + " expected 0.625");
  addCase(report, "golden continuation second variable", std::abs(contB - 0.5625) <= kTolExact,
          "E[max(B,1/2)]=" + str(contB) + " expected 0.5625");
  addCase(report, "continuation gap at least 1/16", contA - contB >= 0.0625 - kTolExact,
          "gap=" + str(contA - contB));

  double eMaxPair = expectedMax(pair);
  addCase(report, "expected max of the pair", std::abs(eMaxPair - 21.0 / 32.0) <= kTolExact,
          "E[max(A,B)]=" + str(eMaxPair) + " expected 0.65625");

  GroupedInstance grouped = groupByIdenticalDistribution(pair);
  addCase(report, "distinct distributions stay ungrouped", grouped.groups.size() == 2,
          "groups=" + std::to_string(grouped.groups.size()));

  report.notes.push_back(
      "the two variables share mean 1/2 and variance 1/16 yet their continuation values "
      "against a deterministic 1/2 differ by 1/16, so grouping keyed on the first two "
      "moments mis-prices the game");
  return report;
}

SuiteReport oracleEquivalence(int count, std::uint64_t seed) {
  SuiteReport report;
  report.suite = "oracle-equivalence";
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    int n = rng.nextInt(2, 6);
    Instance inst = gen::constSupport(n, rng.next(), 3);
    double exact = solveExact(inst).value();
    double brute = bruteForceOracle(inst);
    addCase(report, "instance " + std::to_string(c), std::abs(exact - brute) <= kTolNumeric,
            "exact=" + str(exact) + " brute=" + str(brute));
    Instance norm = normalize(inst);
    double normValue = solveExact(norm).value();
    addCase(report, "instance " + std::to_string(c) + " known ratio floor",
            normValue >= kKnownRatioFloor - kTolNumeric,
            "normalized value=" + str(normValue) + " floor=" + str(kKnownRatioFloor));
  }
  return report;
}

SuiteReport groupingSoundness(int count, std::uint64_t seed) {
  SuiteReport report;
  report.suite = "grouping-soundness";
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    int distinct = rng.nextInt(2, 4);
    std::vector<DiscreteDistribution> dists;
    Instance proto = gen::constSupport(distinct, rng.next(), 4);
    for (const auto& v : proto.variables) dists.push_back(v);
    Instance inst;
    for (int d = 0; d < distinct; ++d) {
      int copies = rng.nextInt(1, 4);
      for (int k = 0; k < copies; ++k)
        inst.variables.push_back(dists[static_cast<std::size_t>(d)]);
    }
    while (inst.size() > 12) inst.variables.pop_back();
    fisherYates(inst.variables, rng);

    GroupedInstance grouped = groupByIdenticalDistribution(inst);
    double gv = solveGrouped(grouped).value();
    double ev = solveExact(inst).value();
    addCase(report, "instance " + std::to_string(c), std::abs(gv - ev) <= kTolNumeric,
            "grouped=" + str(gv) + " exact=" + str(ev));

    GroupSizeCheck size = groupSizeCheck(grouped);
    addCase(report, "instance " + std::to_string(c) + " state bound", size.holds,
            "cardinality product=" + std::to_string(size.cardinalityProduct) +
                " bound=" + str(size.bound) + " memo states=" + std::to_string(size.stateCount));
  }
  report.notes.push_back(
      "memo accounting counts per-group cardinalities; the asserted bound is "
      "prod(k_i) <= ceil(K/g)^g with the literal memo size prod(k_i + 1) reported");
  return report;
}

namespace {

SuiteReport perturbSuite(const std::string& name, bool roundValues, int count,
                         std::uint64_t seed, const std::vector<double>& epsilons) {
  SuiteReport report;
  report.suite = name;
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    int n = rng.nextInt(2, 8);
    Instance inst = gen::constSupport(n, rng.next(), 4);
    double base = solveExact(inst).value();
    for (double eps : epsilons) {
      Instance rounded = roundValues ? roundValuesToPowers(inst, eps)
                                     : roundProbsToPowers(inst, eps);
      double after = solveExact(rounded).value();
      double ratio = after / base;
      std::string label = "instance " + std::to_string(c) + " eps " + str(eps);
      addCase(report, label, ratio >= 1.0 / (1.0 + eps) - kTolNumeric,
              "ratio=" + str(ratio) + " floor=" + str(1.0 / (1.0 + eps)));
      addCase(report, label + " no gain", after <= base + kTolNumeric,
              "after=" + str(after) + " base=" + str(base));
      if (!roundValues) {
        Instance both = roundProbsToPowers(roundValuesToPowers(inst, eps), eps);
        double combined = solveExact(both).value() / base;
        addCase(report, label + " combined",
                combined >= 1.0 / ((1.0 + eps) * (1.0 + eps)) - kTolNumeric,
                "ratio=" + str(combined) +
                    " floor=" + str(1.0 / ((1.0 + eps) * (1.0 + eps))));
      }
    }
  }
  return report;
}

}  // namespace

SuiteReport lemmaValuePerturb(int count, std::uint64_t seed, std::vector<double> epsilons) {
  return perturbSuite("lemma-value-perturb", true, count, seed, epsilons);
}

SuiteReport lemmaProbPerturb(int count, std::uint64_t seed, std::vector<double> epsilons) {
  return perturbSuite("lemma-prob-perturb", false, count, seed, epsilons);
}

SuiteReport claimBundling(int count, std::uint64_t seed) {
  SuiteReport report;
  report.suite = "claim-bundling";
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    Instance norm;
    bool found = false;
    for (int attempt = 0; attempt < 50 && !found; ++attempt) {
      int n = rng.nextInt(2, 8);
      Instance raw = gen::constSupport(n, rng.next(), 4);
      // Plant two above-the-cap atoms on one variable so the merge is
      // nontrivial after normalization.
      std::vector<PointMass> extra;
      for (const auto& a : raw.variables[0].atoms) {
        if (a.value > 0.0) extra.push_back({a.value * 0.3, a.prob * 0.6});
      }
      extra.push_back({rng.nextInRange(4.0, 6.0), rng.nextInRange(0.05, 0.15)});
      extra.push_back({rng.nextInRange(7.0, 9.0), rng.nextInRange(0.05, 0.15)});
      raw.variables[0] = makeDistribution(extra, true);
      norm = normalize(raw);
      int above = 0;
      for (const auto& a : norm.variables[0].atoms) {
        if (a.value > 1.0) ++above;
      }
      found = above >= 2;
    }
    addCase(report, "instance " + std::to_string(c) + " precondition", found,
            "needs a variable with two atoms above 1 after normalization");
    if (!found) continue;
    double before = solveExact(norm).value();
    Instance bundled = bundleAboveOne(norm);
    double after = solveExact(bundled).value();
    addCase(report, "instance " + std::to_string(c), std::abs(before - after) <= kTolNumeric,
            "before=" + str(before) + " after=" + str(after));
  }
  return report;
}

SuiteReport claimHighValue(int count, std::uint64_t seed, double eps) {
  SuiteReport report;
  report.suite = "claim-high-value";
  SplitMix64 rng(seed);
  const double high = 1.0 / (eps * eps);
  for (int c = 0; c < count; ++c) {
    Instance raw = gen::twoPointUniform(6, rng.next(), 0.3, 1.2, 0.2, 0.8);
    int highs = rng.nextInt(1, 2);
    for (int h = 0; h < highs; ++h) {
      double v = rng.nextInRange(30.0, 40.0);
      double p = rng.nextInRange(0.005, 0.015);
      raw.variables.push_back(makeDistribution({{v, p}}, true));
    }
    Instance norm = normalize(raw);
    bool meets = true;
    for (const auto& var : norm.variables) {
      int aboveOne = 0;
      for (const auto& a : var.atoms) {
        if (a.value > 1.0) ++aboveOne;
        if (a.value >= high && a.prob > eps * eps) meets = false;
      }
      if (aboveOne > 1) meets = false;
    }
    double vTop = 0.0;
    for (const auto& var : norm.variables) vTop = std::max(vTop, var.maxValue());
    if (vTop < high) meets = false;
    addCase(report, "instance " + std::to_string(c) + " precondition", meets,
            "top value=" + str(vTop) + " cap=" + str(high));
    if (!meets) continue;
    double ex = solveExact(norm).value();
    Instance compressed = compressHighValues(norm, eps);
    double ey = solveExact(compressed).value();
    addCase(report, "instance " + std::to_string(c) + " lower", ey >= ex - kTolNumeric,
            "compressed=" + str(ey) + " original=" + str(ex));
    addCase(report, "instance " + std::to_string(c) + " upper",
            ey <= (1.0 + eps * eps) * ex + kTolNumeric,
            "compressed=" + str(ey) + " cap=" + str((1.0 + eps * eps) * ex));
  }
  return report;
}

SuiteReport qptasEndToEnd(int count, std::uint64_t seed, double eps) {
  SuiteReport report;
  report.suite = "qptas-end-to-end";
  SchemeConfig config = SchemeConfig::desk(eps);
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    int n = rng.nextInt(2, 10);
    Instance inst = gen::twoPointUniform(n, rng.next());
    double exact = solveExact(inst).value();
    QptasResult approx = solveQptas(inst, config);
    double ratio = approx.value / exact;
    addCase(report, "instance " + std::to_string(c),
            ratio >= 1.0 - 6.0 * eps - kTolNumeric && ratio <= 1.0 + eps + kTolNumeric,
            "ratio=" + str(ratio) + " window=[" + str(1.0 - 6.0 * eps) + "," +
                str(1.0 + eps) + "]");
  }
  report.notes.push_back(
      "the asymptotic runtime guarantee is not reproducible at this scale; the value-ratio "
      "window substitutes for it");
  return report;
}

SuiteReport lemmaErrorProp(int count, std::uint64_t seed, std::vector<double> epsilons,
                           int trials) {
  SuiteReport report;
  report.suite = "lemma-error-prop";
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    int n = rng.nextInt(2, 8);
    Instance inst = c % 2 == 0 ? gen::twoPointUniform(n, rng.next())
                               : gen::constSupport(n, rng.next(), 3);
    for (double eps : epsilons) {
      ErrorPropagationReport rep = checkErrorPropagation(inst, eps, trials, rng.next());
      std::string label = "instance " + std::to_string(c) + " eps " + str(eps);
      addCase(report, label, rep.pass,
              "mean=" + str(rep.sim.mean) + " bound=" + str(rep.bound) +
                  " sem=" + str(rep.sim.sem));
      if (eps == 0.0) {
        addCase(report, label + " two-sided",
                rep.sim.mean <= rep.exactValue + 3.0 * rep.sim.sem,
                "mean=" + str(rep.sim.mean) + " exact=" + str(rep.exactValue) +
                    " sem=" + str(rep.sim.sem));
      }
    }
  }
  return report;
}

SuiteReport ptasDegenerate(int count, std::uint64_t seed) {
  SuiteReport report;
  report.suite = "ptas-degenerate";
  SchemeConfig config = SchemeConfig::desk(0.25);
  SplitMix64 rng(seed);
  for (int c = 0; c < count; ++c) {
    int n = rng.nextInt(3, 9);
    // Probabilities well above the smallness cutoff even after rounding down.
    Instance inst = gen::twoPointUniform(n, rng.next(), 0.3, 2.0, 0.15, 0.9);
    PipelineResult pipeline = runQptasPipeline(inst, config);
    SplitResult split = splitSmallSpecial(pipeline.discretized, config);
    addCase(report, "instance " + std::to_string(c) + " no small atoms",
            split.activeSmallClasses == 0,
            "active classes=" + std::to_string(split.activeSmallClasses));
    BlockLayout layout = buildBlocks(split.instance.size(), split, config);
    G5Result g5 = solveG5(split, layout, config);
    double grouped = solveGrouped(groupByIdenticalDistribution(split.instance)).value();
    addCase(report, "instance " + std::to_string(c), std::abs(g5.value - grouped) <= kTolNumeric,
            "frontloaded=" + str(g5.value) + " grouped=" + str(grouped));
  }
  return report;
}

SuiteReport gameChain(int count, std::uint64_t seed, double eps, int trials, bool anchorSmall) {
  SuiteReport report;
  report.suite = "game-chain";
  SchemeConfig config = SchemeConfig::desk(eps);
  SplitMix64 rng(seed);
  const double epsSq = eps * eps;

  for (int c = 0; c < count; ++c) {
    bool smallTier = anchorSmall && c % 3 == 0;
    Instance inst;
    if (smallTier) {
      // Identical rates: every numbered block receives exactly blockLen
      // equal-rate atoms, so the arrived rate sum can never stray and the
      // failure event has probability zero; the solver anchor is then sharp.
      const int ns[] = {8, 10, 12};
      int n = ns[static_cast<std::size_t>(rng.nextInt(0, 2))];
      double v = rng.nextInRange(0.8, 1.6);
      double p = rng.nextInRange(0.008, 0.03);
      inst.variables.assign(static_cast<std::size_t>(n), makeDistribution({{v, p}}, true));
    } else {
      const int sizes[] = {40, 42, 80, 120, 200};
      int n = sizes[static_cast<std::size_t>(rng.nextInt(0, 4))];
      const double pmaxes[] = {0.01, 0.02, 0.04};
      double pMax = pmaxes[static_cast<std::size_t>(rng.nextInt(0, 2))];
      inst = gen::smallProbSwarm(n, rng.next(), 1, pMax, rng.nextInt(0, 2));
    }
    std::string tag = "instance " + std::to_string(c);

    PipelineResult pipeline = runQptasPipeline(inst, config);
    SplitResult split = splitSmallSpecial(pipeline.discretized, config);
    BlockLayout layout = buildBlocks(split.instance.size(), split, config);
    G5Result g5 = solveG5(split, layout, config);
    GameChainReport chain = simulateGameChain(split, layout, config, g5, trials, rng.next());

    auto direction = [&](const std::string& label, const std::vector<double>& hi, double hiScale,
                         const std::vector<double>& lo, double loScale) {
      Paired d = pairedDiff(hi, hiScale, lo, loScale);
      addCase(report, tag + " " + label, d.mean >= -3.0 * d.sem,
              "diff=" + str(d.mean) + " sem=" + str(d.sem));
    };
    direction("failure zeroing loses", chain.rewards1, 1.0, chain.rewards2, 1.0);
    direction("failure zeroing keeps 1-eps", chain.rewards2, 1.0, chain.rewards1, 1.0 - eps);
    direction("prefix removal loses", chain.rewards2, 1.0, chain.rewards3, 1.0);
    direction("prefix removal keeps 1-eps", chain.rewards3, 1.0, chain.rewards2, 1.0 - eps);
    direction("bundle split loses", chain.rewards3, 1.0, chain.rewards3star, 1.0);
    direction("bundle split keeps 1-eps", chain.rewards3star, 1.0, chain.rewards3, 1.0 - eps);
    direction("outside option gains", chain.rewards4, 1.0, chain.rewards3star, 1.0);
    direction("outside option gains at most 1+eps", chain.rewards3star, 1.0 + eps,
              chain.rewards4, 1.0);
    direction("fixed redraw loses", chain.rewards4, 1.0, chain.rewards5, 1.0);
    direction("fixed redraw keeps 1-eps", chain.rewards5, 1.0, chain.rewards4, 1.0 - eps);

    addCase(report, tag + " failure rate",
            chain.failureRate <= epsSq + 3.0 * chain.failureSem,
            "rate=" + str(chain.failureRate) + " cap=" + str(epsSq) +
                " sem=" + str(chain.failureSem));

    if (smallTier) {
      double opt = solveGrouped(groupByIdenticalDistribution(split.instance)).value();
      addCase(report, tag + " anchor upper", chain.g1.mean <= opt + 3.0 * chain.g1.sem,
              "g1=" + str(chain.g1.mean) + " opt=" + str(opt) + " sem=" + str(chain.g1.sem));
      double safety = 0.5 * std::pow(1.0 - eps, 4);
      addCase(report, tag + " anchor lower", chain.g5.mean >= safety * opt - 3.0 * chain.g5.sem,
              "g5=" + str(chain.g5.mean) + " floor=" + str(safety * opt));
      if (chain.failureRate == 0.0) {
        addCase(report, tag + " solver anchor",
                std::abs(chain.g5.mean - chain.g5SolverValue) <= 3.0 * chain.g5.sem,
                "mean=" + str(chain.g5.mean) + " solver=" + str(chain.g5SolverValue) +
                    " sem=" + str(chain.g5.sem));
      }
      report.notes.push_back(tag + " anchored: g1/opt=" + str(chain.g1.mean / opt) +
                             " solver/opt=" + str(chain.g5SolverValue / opt));
    }
  }
  report.notes.push_back(
      "desk profile substitutes executable exponents (2,2,1,1) for the theoretical "
      "(20,10,4,4); every structural mechanism is exercised at the substituted scale");
  return report;
}

SuiteReport reproducibility(std::uint64_t seed) {
  SuiteReport report;
  report.suite = "reproducibility";

  Instance inst = gen::twoPointUniform(8, seed);
  DpValue dp = solveExact(inst);
  Strategy strat = exactStrategy(dp);
  SimOptions one;
  one.threads = 1;
  SimOptions four;
  four.threads = 4;
  SimResult a = runSim(inst, strat, 20000, seed + 1, one);
  SimResult b = runSim(inst, strat, 20000, seed + 1, one);
  SimResult c = runSim(inst, strat, 20000, seed + 1, four);
  addCase(report, "same seed same thread count", a.mean == b.mean && a.sem == b.sem,
          "meanA=" + str(a.mean) + " meanB=" + str(b.mean));
  addCase(report, "same seed across thread counts", a.mean == c.mean && a.sem == c.sem,
          "mean1=" + str(a.mean) + " mean4=" + str(c.mean));

  SchemeConfig config = SchemeConfig::desk(0.25);
  Instance swarm = gen::smallProbSwarm(40, seed + 2, 1, 0.02, 1);
  PipelineResult pipeline = runQptasPipeline(swarm, config);
  SplitResult split = splitSmallSpecial(pipeline.discretized, config);
  BlockLayout layout = buildBlocks(split.instance.size(), split, config);
  G5Result g5 = solveG5(split, layout, config);
  GameChainReport r1 = simulateGameChain(split, layout, config, g5, 500, seed + 3);
  GameChainReport r2 = simulateGameChain(split, layout, config, g5, 500, seed + 3);
  bool equal = r1.rewards1 == r2.rewards1 && r1.rewards2 == r2.rewards2 &&
               r1.rewards3 == r2.rewards3 && r1.rewards3star == r2.rewards3star &&
               r1.rewards4 == r2.rewards4 && r1.rewards5 == r2.rewards5 &&
               r1.failureRate == r2.failureRate;
  addCase(report, "game chain bitwise stable", equal,
          "g1=" + str(r1.g1.mean) + " rerun=" + str(r2.g1.mean));
  return report;
}

}  // namespace stopkit::checks
