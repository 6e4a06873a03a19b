#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stopkit/checks.hpp"
#include "stopkit/discretize.hpp"
#include "stopkit/errors.hpp"
#include "stopkit/exact_dp.hpp"
#include "stopkit/gen.hpp"
#include "stopkit/grouped_dp.hpp"
#include "stopkit/model.hpp"
#include "stopkit/preprocess.hpp"
#include "stopkit/ptas.hpp"
#include "stopkit/qptas.hpp"
#include "stopkit/rng.hpp"
#include "stopkit/simulate.hpp"

using nlohmann::ordered_json;

namespace {

void emit(const ordered_json& j, const std::string& outPath) {
  std::string text = j.dump(2) + "\n";
  if (outPath.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(outPath);
  if (!out) throw stopkit::ParseError("cannot write " + outPath);
  out << text;
}

ordered_json configJson(const stopkit::SchemeConfig& c) {
  ordered_json j;
  j["epsilon"] = c.epsilon;
  j["profile"] = c.profileName();
  j["smallProbExp"] = c.smallProbExp;
  j["ignoreMassExp"] = c.ignoreMassExp;
  j["blockMassExp"] = c.blockMassExp;
  j["blockCountExp"] = c.blockCountExp;
  return j;
}

ordered_json logJson(const stopkit::TransformLog& log) {
  ordered_json steps = ordered_json::array();
  for (const auto& s : log.steps) {
    ordered_json j;
    j["name"] = s.name;
    j["variablesTouched"] = s.variablesTouched;
    j["massMoved"] = s.massMoved;
    j["lossLowerFactor"] = s.lossLowerFactor;
    j["gainUpperFactor"] = s.gainUpperFactor;
    steps.push_back(std::move(j));
  }
  ordered_json j;
  j["steps"] = std::move(steps);
  j["composedLowerFactor"] = log.composedLowerFactor();
  j["composedUpperFactor"] = log.composedUpperFactor();
  return j;
}

ordered_json suiteJson(const stopkit::checks::SuiteReport& report) {
  ordered_json j;
  j["suite"] = report.suite;
  j["passed"] = report.pass();
  j["failures"] = report.failures();
  j["caseCount"] = report.cases.size();
  ordered_json cases = ordered_json::array();
  for (const auto& c : report.cases) {
    ordered_json cj;
    cj["label"] = c.label;
    cj["pass"] = c.pass;
    cj["detail"] = c.detail;
    cases.push_back(std::move(cj));
  }
  j["cases"] = std::move(cases);
  j["notes"] = report.notes;
  return j;
}

ordered_json estimateJson(const stopkit::GameEstimate& e) {
  ordered_json j;
  j["mean"] = e.mean;
  j["sem"] = e.sem;
  return j;
}

struct GenArgs {
  std::string family;
  int n = 8;
  std::uint64_t seed = 1;
  std::string out;
  double vLo = 0.1, vHi = 2.0, pLo = 0.05, pHi = 0.95;
  int supportC = 3;
  int valueCount = 2;
  double pMax = 0.02;
  int specials = 2;
};

int runGen(const GenArgs& a) {
  stopkit::Instance inst;
  if (a.family == "two-point-uniform") {
    inst = stopkit::gen::twoPointUniform(a.n, a.seed, a.vLo, a.vHi, a.pLo, a.pHi);
  } else if (a.family == "const-support-c") {
    inst = stopkit::gen::constSupport(a.n, a.seed, a.supportC);
  } else if (a.family == "heavy-tail-one-atom") {
    inst = stopkit::gen::heavyTailOneAtom(a.n, a.seed);
  } else if (a.family == "appendix-A-counterexample") {
    inst = stopkit::gen::counterexamplePair();
  } else if (a.family == "small-prob-swarm") {
    inst = stopkit::gen::smallProbSwarm(a.n, a.seed, a.valueCount, a.pMax, a.specials);
  } else {
    std::cerr << "unknown family: " << a.family << "\n";
    return 2;
  }
  if (a.out.empty()) {
    std::cout << stopkit::instanceToJsonText(inst);
  } else {
    stopkit::writeInstance(inst, a.out);
  }
  return 0;
}

struct SolveExactArgs {
  std::string input;
  std::string out;
  bool dumpDp = false;
};

int runSolveExact(const SolveExactArgs& a) {
  stopkit::Instance inst = stopkit::readInstance(a.input);
  stopkit::DpValue dp = stopkit::solveExact(inst);
  ordered_json j;
  j["command"] = "solve-exact";
  j["input"] = a.input;
  j["n"] = inst.size();
  j["value"] = dp.value() * inst.scale;
  j["scale"] = inst.scale;
  if (a.dumpDp) {
    // Index is the bitmask of the remaining-variable set.
    j["thresholds"] = dp.thresholds();
  }
  emit(j, a.out);
  return 0;
}

struct SolveApproxArgs {
  std::string input;
  std::string out;
  double epsilon = 0.2;
  std::string profile = "desk";
};

stopkit::SchemeConfig makeConfig(double epsilon, const std::string& profile) {
  if (profile == "desk") return stopkit::SchemeConfig::desk(epsilon);
  if (profile == "theoretical") return stopkit::SchemeConfig::theoretical(epsilon);
  throw stopkit::ValidationError("unknown profile: " + profile);
}

int runSolveQptas(const SolveApproxArgs& a) {
  stopkit::Instance inst = stopkit::readInstance(a.input);
  stopkit::SchemeConfig config = makeConfig(a.epsilon, a.profile);
  stopkit::QptasResult result = stopkit::solveQptas(inst, config);
  ordered_json j;
  j["command"] = "solve-qptas";
  j["input"] = a.input;
  j["config"] = configJson(config);
  j["n"] = inst.size();
  j["value"] = result.value * inst.scale;
  j["normFactor"] = result.normFactor;
  j["supportBound"] = result.supportBound;
  j["groupCount"] = result.grouped.groups.size();
  j["lossConstant"] = result.lossConstant;
  j["composedLowerFactor"] = result.composedLowerFactor;
  j["composedUpperFactor"] = result.composedUpperFactor;
  j["transforms"] = logJson(result.log);
  emit(j, a.out);
  return 0;
}

int runSolvePtas(const SolveApproxArgs& a) {
  stopkit::Instance inst = stopkit::readInstance(a.input);
  stopkit::SchemeConfig config = makeConfig(a.epsilon, a.profile);
  stopkit::PtasResult result = stopkit::solvePtas(inst, config);
  ordered_json j;
  j["command"] = "solve-ptas";
  j["input"] = a.input;
  j["config"] = configJson(config);
  j["n"] = inst.size();
  j["value"] = result.value * inst.scale;
  j["normFactor"] = result.normFactor;
  j["activeSmallClasses"] = result.split.activeSmallClasses;
  ordered_json classes = ordered_json::array();
  for (const auto& cl : result.layout.classes) {
    ordered_json cj;
    cj["value"] = cl.value;
    cj["blockCount"] = cl.blockCount;
    cj["blockLen"] = cl.blockLen;
    cj["b0End"] = cl.b0End;
    cj["redrawProb"] = cl.redrawProb;
    classes.push_back(std::move(cj));
  }
  j["layout"] = std::move(classes);
  j["transforms"] = logJson(result.log);
  emit(j, a.out);
  return 0;
}

struct SimArgs {
  std::string input;
  std::string out;
  std::string strategy = "exact";
  int trials = 100000;
  std::uint64_t seed = 1;
  double epsilon = 0.2;
  std::string profile = "desk";
  int threads = 0;
};

int runSimulate(const SimArgs& a) {
  stopkit::Instance inst = stopkit::readInstance(a.input);
  stopkit::Strategy strategy;
  ordered_json extra;
  if (a.strategy == "exact") {
    stopkit::DpValue dp = stopkit::solveExact(inst);
    extra["exactValue"] = dp.value();
    strategy = stopkit::exactStrategy(dp);
  } else if (a.strategy == "qptas") {
    stopkit::QptasResult result = stopkit::solveQptas(inst, makeConfig(a.epsilon, a.profile));
    extra["qptasValue"] = result.value;
    strategy = stopkit::qptasStrategy(result);
  } else if (a.strategy == "ptas") {
    stopkit::PtasResult result = stopkit::solvePtas(inst, makeConfig(a.epsilon, a.profile));
    extra["ptasValue"] = result.value;
    strategy = stopkit::ptasStrategy(result);
  } else if (a.strategy.rfind("threshold:", 0) == 0) {
    double v = std::stod(a.strategy.substr(10));
    strategy = stopkit::strategyFromOracle(
        "threshold", [v](const std::vector<int>&) { return v; });
  } else {
    std::cerr << "unknown strategy: " << a.strategy << "\n";
    return 2;
  }
  stopkit::SimOptions options;
  options.threads = a.threads;
  stopkit::SimResult result = stopkit::runSim(inst, strategy, a.trials, a.seed, options);
  ordered_json j;
  j["command"] = "simulate";
  j["input"] = a.input;
  j["strategy"] = a.strategy;
  j["trials"] = result.trials;
  j["seed"] = result.seed;
  j["mean"] = result.mean;
  j["sem"] = result.sem;
  for (auto& [k, v] : extra.items()) j[k] = v;
  emit(j, a.out);
  return 0;
}

struct ChainArgs {
  std::string input;
  std::string out;
  int trials = 4000;
  std::uint64_t seed = 1;
  double epsilon = 0.25;
  std::string profile = "desk";
  int n = 40;
  double pMax = 0.02;
  int specials = 1;
};

int runCheckChain(const ChainArgs& a) {
  stopkit::Instance inst;
  if (a.input.empty()) {
    inst = stopkit::gen::smallProbSwarm(a.n, a.seed, 1, a.pMax, a.specials);
  } else {
    inst = stopkit::readInstance(a.input);
  }
  stopkit::SchemeConfig config = makeConfig(a.epsilon, a.profile);
  stopkit::PipelineResult pipeline = stopkit::runQptasPipeline(inst, config);
  stopkit::SplitResult split = stopkit::splitSmallSpecial(pipeline.discretized, config);
  stopkit::BlockLayout layout = stopkit::buildBlocks(split.instance.size(), split, config);
  stopkit::G5Result g5 = stopkit::solveG5(split, layout, config);
  stopkit::GameChainReport chain =
      stopkit::simulateGameChain(split, layout, config, g5, a.trials, a.seed);

  bool allPass = true;
  ordered_json directions = ordered_json::array();
  auto direction = [&](const std::string& name, const std::vector<double>& hi, double hiScale,
                       const std::vector<double>& lo, double loScale) {
    std::vector<double> d(hi.size());
    for (std::size_t i = 0; i < hi.size(); ++i) d[i] = hiScale * hi[i] - loScale * lo[i];
    double mean = stopkit::pairwiseSum(d) / static_cast<double>(d.size());
    double var = 0.0;
    for (double x : d) var += (x - mean) * (x - mean);
    double sem = d.size() > 1
                     ? std::sqrt(var / (static_cast<double>(d.size()) - 1.0) /
                                 static_cast<double>(d.size()))
                     : 0.0;
    bool pass = mean >= -3.0 * sem;
    allPass = allPass && pass;
    ordered_json j;
    j["name"] = name;
    j["pass"] = pass;
    j["diff"] = mean;
    j["sem"] = sem;
    directions.push_back(std::move(j));
  };
  const double eps = a.epsilon;
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
  bool failureOk = chain.failureRate <= eps * eps + 3.0 * chain.failureSem;
  allPass = allPass && failureOk;

  ordered_json j;
  j["command"] = "check-chain";
  j["input"] = a.input.empty() ? "generated small-prob-swarm" : a.input;
  j["config"] = configJson(config);
  j["trials"] = chain.trials;
  j["seed"] = chain.seed;
  j["estimates"]["g1"] = estimateJson(chain.g1);
  j["estimates"]["g2"] = estimateJson(chain.g2);
  j["estimates"]["g3"] = estimateJson(chain.g3);
  j["estimates"]["g3star"] = estimateJson(chain.g3star);
  j["estimates"]["g4"] = estimateJson(chain.g4);
  j["estimates"]["g5"] = estimateJson(chain.g5);
  j["solverValue"] = chain.g5SolverValue;
  j["failureRate"] = chain.failureRate;
  j["failureSem"] = chain.failureSem;
  j["failureWithinCap"] = failureOk;
  j["directions"] = std::move(directions);
  j["pass"] = allPass;
  j["profileNote"] =
      "desk profile substitutes executable exponents for the theoretical ones; structural "
      "mechanisms unchanged";
  emit(j, a.out);
  return allPass ? 0 : 1;
}

struct CheckArgs {
  std::string suite;
  std::string out;
  int count = -1;
  std::uint64_t seed = 1;
  int trials = -1;
  double epsilon = -1.0;
};

int runCheck(const CheckArgs& a) {
  using namespace stopkit::checks;
  SuiteReport report;
  int count = a.count;
  int trials = a.trials;
  double eps = a.epsilon;
  if (a.suite == "counterexample") {
    report = counterexample();
  } else if (a.suite == "grouping-soundness") {
    report = groupingSoundness(count < 0 ? 200 : count, a.seed);
  } else if (a.suite == "lemma-value-perturb") {
    report = lemmaValuePerturb(count < 0 ? 200 : count, a.seed);
  } else if (a.suite == "lemma-prob-perturb") {
    report = lemmaProbPerturb(count < 0 ? 200 : count, a.seed);
  } else if (a.suite == "claim-bundling") {
    report = claimBundling(count < 0 ? 200 : count, a.seed);
  } else if (a.suite == "claim-high-value") {
    report = claimHighValue(count < 0 ? 100 : count, a.seed, eps < 0 ? 0.3 : eps);
  } else if (a.suite == "lemma-error-prop") {
    report = lemmaErrorProp(count < 0 ? 50 : count, a.seed, {0.0, 0.1},
                            trials < 0 ? 100000 : trials);
  } else if (a.suite == "game-chain") {
    report = gameChain(count < 0 ? 50 : count, a.seed, eps < 0 ? 0.25 : eps,
                       trials < 0 ? 4000 : trials);
  } else {
    std::cerr << "unknown suite: " << a.suite << "\n";
    return 2;
  }
  ordered_json j;
  j["command"] = "check";
  j["seed"] = a.seed;
  j["report"] = suiteJson(report);
  emit(j, a.out);
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stopping-game solver toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* genCmd = app.add_subcommand("gen", "generate an instance file");
  genCmd->add_option("--family", gen.family,
                     "two-point-uniform|const-support-c|heavy-tail-one-atom|"
                     "appendix-A-counterexample|small-prob-swarm")
      ->required();
  genCmd->add_option("--n", gen.n, "number of variables");
  genCmd->add_option("--seed", gen.seed, "generator seed");
  genCmd->add_option("--out", gen.out, "output file (default stdout)");
  genCmd->add_option("--v-lo", gen.vLo, "two-point value lower bound");
  genCmd->add_option("--v-hi", gen.vHi, "two-point value upper bound");
  genCmd->add_option("--p-lo", gen.pLo, "two-point probability lower bound");
  genCmd->add_option("--p-hi", gen.pHi, "two-point probability upper bound");
  genCmd->add_option("--support-c", gen.supportC, "atoms per variable cap");
  genCmd->add_option("--value-count", gen.valueCount, "swarm shared value count");
  genCmd->add_option("--p-max", gen.pMax, "swarm probability cap");
  genCmd->add_option("--specials", gen.specials, "swarm ordinary variable count");

  SolveExactArgs exact;
  CLI::App* exactCmd = app.add_subcommand("solve-exact", "exact value by subset recursion");
  exactCmd->add_option("--input", exact.input, "instance file")->required();
  exactCmd->add_option("--out", exact.out, "report file (default stdout)");
  exactCmd->add_flag("--dump-dp", exact.dumpDp, "include the full threshold table");

  SolveApproxArgs qptas;
  CLI::App* qptasCmd = app.add_subcommand("solve-qptas", "discretize, group, and solve");
  qptasCmd->add_option("--input", qptas.input, "instance file")->required();
  qptasCmd->add_option("--epsilon", qptas.epsilon, "accuracy parameter in (0, 0.5)");
  qptasCmd->add_option("--profile", qptas.profile, "desk|theoretical");
  qptasCmd->add_option("--out", qptas.out, "report file (default stdout)");

  SolveApproxArgs ptas;
  ptas.epsilon = 0.25;
  CLI::App* ptasCmd = app.add_subcommand("solve-ptas", "frontloaded block solve");
  ptasCmd->add_option("--input", ptas.input, "instance file")->required();
  ptasCmd->add_option("--epsilon", ptas.epsilon, "accuracy parameter in (0, 0.5)");
  ptasCmd->add_option("--profile", ptas.profile, "desk|theoretical");
  ptasCmd->add_option("--out", ptas.out, "report file (default stdout)");

  SimArgs sim;
  CLI::App* simCmd = app.add_subcommand("simulate", "Monte-Carlo strategy evaluation");
  simCmd->add_option("--input", sim.input, "instance file")->required();
  simCmd->add_option("--strategy", sim.strategy, "exact|qptas|ptas|threshold:V");
  simCmd->add_option("--trials", sim.trials, "trial count");
  simCmd->add_option("--seed", sim.seed, "simulation seed");
  simCmd->add_option("--epsilon", sim.epsilon, "accuracy for qptas/ptas strategies");
  simCmd->add_option("--profile", sim.profile, "desk|theoretical");
  simCmd->add_option("--threads", sim.threads, "worker threads (0 = STOPKIT_THREADS or 1)");
  simCmd->add_option("--out", sim.out, "report file (default stdout)");

  ChainArgs chain;
  CLI::App* chainCmd = app.add_subcommand("check-chain", "game-chain Monte-Carlo sandwich");
  chainCmd->add_option("--input", chain.input, "instance file (default: generated swarm)");
  chainCmd->add_option("--trials", chain.trials, "trial count");
  chainCmd->add_option("--seed", chain.seed, "simulation seed");
  chainCmd->add_option("--epsilon", chain.epsilon, "accuracy parameter");
  chainCmd->add_option("--profile", chain.profile, "desk|theoretical");
  chainCmd->add_option("--n", chain.n, "generated swarm size");
  chainCmd->add_option("--p-max", chain.pMax, "generated swarm probability cap");
  chainCmd->add_option("--specials", chain.specials, "generated swarm ordinary variables");
  chainCmd->add_option("--out", chain.out, "report file (default stdout)");

  CheckArgs check;
  CLI::App* checkCmd = app.add_subcommand("check", "property battery");
  checkCmd->add_option("--suite", check.suite,
                       "lemma-value-perturb|lemma-prob-perturb|claim-bundling|claim-high-value|"
                       "lemma-error-prop|game-chain|grouping-soundness|counterexample")
      ->required();
  checkCmd->add_option("--count", check.count, "instance count (suite default when omitted)");
  checkCmd->add_option("--seed", check.seed, "suite seed");
  checkCmd->add_option("--trials", check.trials, "Monte-Carlo trials (suite default)");
  checkCmd->add_option("--epsilon", check.epsilon, "accuracy (suite default)");
  checkCmd->add_option("--out", check.out, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(genCmd)) return runGen(gen);
    if (app.got_subcommand(exactCmd)) return runSolveExact(exact);
    if (app.got_subcommand(qptasCmd)) return runSolveQptas(qptas);
    if (app.got_subcommand(ptasCmd)) return runSolvePtas(ptas);
    if (app.got_subcommand(simCmd)) return runSimulate(sim);
    if (app.got_subcommand(chainCmd)) return runCheckChain(chain);
    if (app.got_subcommand(checkCmd)) return runCheck(check);
  } catch (const stopkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
