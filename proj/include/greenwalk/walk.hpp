#pragma once

#include <variant>

#include "greenwalk/measure.hpp"

namespace greenwalk {

struct HomogeneousWalk {
  LatticeMeasure step;
};

// Kemperman chain: neg_side is the step law applied at sites <= 0, pos_side
// the one applied at sites >= 1. Supports are unrestricted.
struct OscillatingWalk {
  LatticeMeasure neg_side;
  LatticeMeasure pos_side;
};

// The concentrated chain: jumps by mu_plus (support in N*) from sites <= 0
// and by nu_minus (support in -N*) from sites >= 1. Masses may be < 1; the
// deficit is escape-to-infinity and the DP tracks it as leaked mass.
struct ConcentratedWalk {
  LatticeMeasure mu_plus;
  LatticeMeasure nu_minus;
};

using WalkSpec = std::variant<HomogeneousWalk, OscillatingWalk, ConcentratedWalk>;

// Step law in force at position pos.
const LatticeMeasure& law_at(const WalkSpec& walk, long long pos);

// Throws std::invalid_argument on malformed specs (support violations,
// non-probability inputs where required).
void validate(const WalkSpec& walk);

}  // namespace greenwalk
