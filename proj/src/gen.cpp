#include "stopkit/gen.hpp"

#include <vector>

#include "stopkit/errors.hpp"
#include "stopkit/rng.hpp"

namespace stopkit::gen {

namespace {

void requirePositive(int n) {
  if (n < 1) throw ValidationError("generator needs at least one variable");
}

}  // namespace

Instance twoPointUniform(int n, std::uint64_t seed, double vLo, double vHi, double pLo,
                         double pHi) {
  requirePositive(n);
  if (!(0.0 < vLo && vLo <= vHi)) throw ValidationError("value range must satisfy 0 < vLo <= vHi");
  if (!(0.0 < pLo && pLo <= pHi && pHi < 1.0))
    throw ValidationError("probability range must satisfy 0 < pLo <= pHi < 1");
  SplitMix64 rng(seed);
  Instance inst;
  for (int i = 0; i < n; ++i) {
    double v = rng.nextInRange(vLo, vHi);
    double p = rng.nextInRange(pLo, pHi);
    inst.variables.push_back(makeDistribution({{v, p}}, true));
  }
  return inst;
}

Instance constSupport(int n, std::uint64_t seed, int c) {
  requirePositive(n);
  if (c < 2) throw ValidationError("support size must be at least 2");
  SplitMix64 rng(seed);
  Instance inst;
  for (int i = 0; i < n; ++i) {
    int atoms = rng.nextInt(1, c - 1);
    std::vector<PointMass> pm;
    double mass = 0.0;
    for (int a = 0; a < atoms; ++a) {
      double v = rng.nextInRange(0.05, 2.5);
      double p = rng.nextInRange(0.05, 0.9 / atoms);
      pm.push_back({v, p});
      mass += p;
    }
    (void)mass;
    inst.variables.push_back(makeDistribution(pm, true));
  }
  return inst;
}

Instance heavyTailOneAtom(int n, std::uint64_t seed) {
  requirePositive(n);
  SplitMix64 rng(seed);
  Instance inst = twoPointUniform(n, rng.next(), 0.2, 1.5, 0.1, 0.8);
  double huge = rng.nextInRange(50.0, 200.0);
  double rare = rng.nextInRange(0.001, 0.01);
  int slot = rng.nextInt(0, n - 1);
  inst.variables[static_cast<std::size_t>(slot)] = makeDistribution({{huge, rare}}, true);
  return inst;
}

Instance counterexamplePair() {
  Instance inst;
  inst.variables.push_back(makeDistribution({{0.25, 0.5}, {0.75, 0.5}}));
  inst.variables.push_back(makeDistribution({{0.0, 0.125}, {0.5, 0.75}, {1.0, 0.125}}));
  return inst;
}

Instance smallProbSwarm(int n, std::uint64_t seed, int valueCount, double pMax, int specials) {
  requirePositive(n);
  if (valueCount < 1) throw ValidationError("need at least one swarm value");
  if (!(0.0 < pMax && pMax < 1.0)) throw ValidationError("pMax must lie in (0, 1)");
  if (specials < 0 || specials >= n) throw ValidationError("specials must lie in [0, n)");
  SplitMix64 rng(seed);
  std::vector<double> values;
  for (int v = 0; v < valueCount; ++v) values.push_back(rng.nextInRange(0.5, 2.0));
  Instance inst;
  for (int i = 0; i < n - specials; ++i) {
    // Every swarm variable carries one tiny atom at one of the shared values.
    double v = values[static_cast<std::size_t>(rng.nextInt(0, valueCount - 1))];
    double p = rng.nextInRange(pMax * 0.5, pMax);
    inst.variables.push_back(makeDistribution({{v, p}}, true));
  }
  for (int i = 0; i < specials; ++i) {
    double v = rng.nextInRange(0.3, 1.0);
    double p = rng.nextInRange(0.3, 0.7);
    inst.variables.push_back(makeDistribution({{v, p}}, true));
  }
  return inst;
}

}  // namespace stopkit::gen
