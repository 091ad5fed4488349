#pragma once

#include <string>
#include <string_view>

#include "gmfg/distribution.hpp"

namespace gmfg {

// Decimal with 17 significant digits; round-trips every finite double.
std::string format_real(double x);

// Flat text dumps used for traces and golden files:
//
//   distribution
//   labels 0 1 2
//   weights 0.5 0.5 0
//
//   joint
//   states 0 1
//   actions 0 1
//   weights <row-major |S|x|A| values>
//
// Labels must not contain whitespace. Parsing checks labels against the
// supplied spaces.
std::string format_distribution(const Distribution& d);
Distribution parse_distribution(std::string_view text, SpacePtr space);

std::string format_joint(const JointDistribution& joint);
JointDistribution parse_joint(std::string_view text, SpacePtr states, SpacePtr actions);

}  // namespace gmfg
