#pragma once

#include <cstdint>

#include "stopkit/model.hpp"

namespace stopkit::gen {

// Deterministic instance families keyed by seed. Parameters beyond (n, seed)
// have CLI-exposed defaults.

// Independent two-point variables: value v_i with probability p_i, else 0.
Instance twoPointUniform(int n, std::uint64_t seed, double vLo = 0.1, double vHi = 2.0,
                         double pLo = 0.05, double pHi = 0.95);

// At most `c` atoms per variable including the value-0 atom.
Instance constSupport(int n, std::uint64_t seed, int c = 3);

// Moderate two-point variables plus one variable holding a single huge,
// rare atom.
Instance heavyTailOneAtom(int n, std::uint64_t seed);

// The fixed two-variable pair with identical mean and variance whose
// continuation values against a deterministic 1/2 differ; defeats any
// grouping keyed on the first two moments.
Instance counterexamplePair();

// Many variables carrying tiny-probability atoms at a few shared values,
// plus a few ordinary-probability variables: the frontloading stressor.
Instance smallProbSwarm(int n, std::uint64_t seed, int valueCount = 2, double pMax = 0.02,
                        int specials = 2);

}  // namespace stopkit::gen
