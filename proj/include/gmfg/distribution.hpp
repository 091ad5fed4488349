#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmfg/space.hpp"

namespace gmfg {

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kRenormalizeLimit = 1e-7;

// Validates a weight vector in place: rejects non-finite or clearly negative
// entries, clamps rounding-level negatives to zero, and rescales when the sum
// drifted from 1 by less than kRenormalizeLimit. Throws UsageError otherwise.
void normalize_weights(std::span<double> weights);

class Policy;

class Distribution {
 public:
  Distribution(SpacePtr space, std::vector<double> weights);

  static Distribution uniform(SpacePtr space);
  static Distribution point_mass(SpacePtr space, std::size_t index);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

  bool operator==(const Distribution& other) const {
    return same_space(space_, other.space_) && weights_ == other.weights_;
  }

 private:
  SpacePtr space_;
  std::vector<double> weights_;
};

// Population state-action measure; weights are row-major (state, action).
class JointDistribution {
 public:
  JointDistribution(SpacePtr states, SpacePtr actions, std::vector<double> weights);

  static JointDistribution uniform(SpacePtr states, SpacePtr actions);
  static JointDistribution point_mass(SpacePtr states, SpacePtr actions, std::size_t s,
                                      std::size_t a);
  // mu(s) * pi(s, a).
  static JointDistribution from_marginal(const Distribution& mu, const Policy& policy);

  const SpacePtr& state_space() const noexcept { return states_; }
  const SpacePtr& action_space() const noexcept { return actions_; }
  std::size_t num_states() const noexcept { return states_->size(); }
  std::size_t num_actions() const noexcept { return actions_->size(); }

  std::span<const double> weights() const noexcept { return weights_; }
  double at(std::size_t s, std::size_t a) const { return weights_[s * num_actions() + a]; }

  Distribution state_marginal() const;
  Distribution action_marginal() const;
  std::vector<double> state_marginal_weights() const;
  std::vector<double> action_marginal_weights() const;

  bool same_spaces(const JointDistribution& other) const;
  bool operator==(const JointDistribution& other) const {
    return same_spaces(other) && weights_ == other.weights_;
  }

 private:
  SpacePtr states_;
  SpacePtr actions_;
  std::vector<double> weights_;
};

// Stationary randomized feedback policy; probabilities are row-major.
class Policy {
 public:
  Policy(SpacePtr states, SpacePtr actions, std::vector<double> probs);

  static Policy uniform(SpacePtr states, SpacePtr actions);

  const SpacePtr& state_space() const noexcept { return states_; }
  const SpacePtr& action_space() const noexcept { return actions_; }
  std::size_t num_states() const noexcept { return states_->size(); }
  std::size_t num_actions() const noexcept { return actions_->size(); }

  std::span<const double> row(std::size_t s) const {
    return {probs_.data() + s * num_actions(), num_actions()};
  }
  double at(std::size_t s, std::size_t a) const { return probs_[s * num_actions() + a]; }
  std::span<const double> probabilities() const noexcept { return probs_; }
  Distribution row_distribution(std::size_t s) const;

  bool operator==(const Policy& other) const { return probs_ == other.probs_; }

 private:
  SpacePtr states_;
  SpacePtr actions_;
  std::vector<double> probs_;
};

// Tabular action values with visit counts. Mutated by a single learner.
class QTable {
 public:
  QTable(std::size_t states, std::size_t actions, double init = 0.0);

  std::size_t num_states() const noexcept { return states_; }
  std::size_t num_actions() const noexcept { return actions_; }

  double at(std::size_t s, std::size_t a) const { return values_[s * actions_ + a]; }
  double& at(std::size_t s, std::size_t a) { return values_[s * actions_ + a]; }
  std::span<const double> row(std::size_t s) const {
    return {values_.data() + s * actions_, actions_};
  }
  std::span<double> row(std::size_t s) { return {values_.data() + s * actions_, actions_}; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  std::uint64_t visits(std::size_t s, std::size_t a) const { return visits_[s * actions_ + a]; }
  std::span<const std::uint64_t> visit_counts() const noexcept { return visits_; }

  // Stochastic-approximation step Q <- (1 - beta) Q + beta * target; counts
  // the visit and returns the step size that was applied.
  double blend(std::size_t s, std::size_t a, double target, double step_exponent);

  double row_max(std::size_t s) const;
  std::vector<double> state_values() const;

 private:
  std::size_t states_;
  std::size_t actions_;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
};

}  // namespace gmfg
