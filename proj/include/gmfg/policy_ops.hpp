#pragma once

#include <span>
#include <vector>

#include "gmfg/distribution.hpp"

namespace gmfg {

// Absolute tolerance below which two action values count as tied.
inline constexpr double kTieTolerance = 1e-9;

// Boltzmann weights exp(c x_i) / sum_j exp(c x_j), evaluated after a max
// shift so large c*x cannot overflow.
std::vector<double> softmax(std::span<const double> x, double c);
// Uniform over the maximizers of x (ties within kTieTolerance).
std::vector<double> argmax_e(std::span<const double> x);
// Max minus the largest value strictly below the max; +inf if all tied.
double action_gap(std::span<const double> x);

Distribution softmax(SpacePtr actions, std::span<const double> x, double c);
Distribution argmax_e(SpacePtr actions, std::span<const double> x);

// Row-wise policy operators over a Q-table.
Policy softmax_policy(const QTable& q, double c, SpacePtr states, SpacePtr actions);
Policy argmax_policy(const QTable& q, SpacePtr states, SpacePtr actions);

}  // namespace gmfg
