#include "gmfg/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmfg/errors.hpp"

namespace gmfg {

void normalize_weights(std::span<double> weights) {
  if (weights.empty()) throw UsageError("distribution: empty weight vector");
  double total = 0.0;
  for (double& w : weights) {
    if (!std::isfinite(w)) throw UsageError("distribution: non-finite weight");
    if (w < 0.0) {
      if (w < -kNormTolerance) throw UsageError("distribution: negative weight " + std::to_string(w));
      w = 0.0;
    }
    total += w;
  }
  const double drift = std::abs(total - 1.0);
  if (drift <= kNormTolerance) return;
  if (drift < kRenormalizeLimit) {
    for (double& w : weights) w /= total;
    return;
  }
  throw UsageError("distribution: weights sum to " + std::to_string(total));
}

Distribution::Distribution(SpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  if (!space_) throw UsageError("distribution: null space");
  if (weights_.size() != space_->size()) throw UsageError("distribution: size mismatch");
  normalize_weights(weights_);
}

Distribution Distribution::uniform(SpacePtr space) {
  const std::size_t n = space->size();
  return Distribution(std::move(space), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::point_mass(SpacePtr space, std::size_t index) {
  std::vector<double> w(space->size(), 0.0);
  w.at(index) = 1.0;
  return Distribution(std::move(space), std::move(w));
}

JointDistribution::JointDistribution(SpacePtr states, SpacePtr actions, std::vector<double> weights)
    : states_(std::move(states)), actions_(std::move(actions)), weights_(std::move(weights)) {
  if (!states_ || !actions_) throw UsageError("joint: null space");
  if (weights_.size() != states_->size() * actions_->size())
    throw UsageError("joint: weight count does not match |S|x|A|");
  normalize_weights(weights_);
}

JointDistribution JointDistribution::uniform(SpacePtr states, SpacePtr actions) {
  const std::size_t n = states->size() * actions->size();
  return JointDistribution(std::move(states), std::move(actions),
                           std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

JointDistribution JointDistribution::point_mass(SpacePtr states, SpacePtr actions, std::size_t s,
                                                std::size_t a) {
  std::vector<double> w(states->size() * actions->size(), 0.0);
  w.at(s * actions->size() + a) = 1.0;
  return JointDistribution(std::move(states), std::move(actions), std::move(w));
}

JointDistribution JointDistribution::from_marginal(const Distribution& mu, const Policy& policy) {
  if (!same_space(mu.space(), policy.state_space()))
    throw UsageError("from_marginal: state spaces differ");
  const std::size_t na = policy.num_actions();
  std::vector<double> w(mu.size() * na);
  for (std::size_t s = 0; s < mu.size(); ++s)
    for (std::size_t a = 0; a < na; ++a) w[s * na + a] = mu[s] * policy.at(s, a);
  return JointDistribution(policy.state_space(), policy.action_space(), std::move(w));
}

Distribution JointDistribution::state_marginal() const {
  return Distribution(states_, state_marginal_weights());
}

Distribution JointDistribution::action_marginal() const {
  return Distribution(actions_, action_marginal_weights());
}

std::vector<double> JointDistribution::state_marginal_weights() const {
  const std::size_t na = num_actions();
  std::vector<double> mu(num_states(), 0.0);
  for (std::size_t s = 0; s < mu.size(); ++s)
    for (std::size_t a = 0; a < na; ++a) mu[s] += weights_[s * na + a];
  return mu;
}

std::vector<double> JointDistribution::action_marginal_weights() const {
  const std::size_t na = num_actions();
  std::vector<double> alpha(na, 0.0);
  for (std::size_t s = 0; s < num_states(); ++s)
    for (std::size_t a = 0; a < na; ++a) alpha[a] += weights_[s * na + a];
  return alpha;
}

bool JointDistribution::same_spaces(const JointDistribution& other) const {
  return same_space(states_, other.states_) && same_space(actions_, other.actions_);
}

Policy::Policy(SpacePtr states, SpacePtr actions, std::vector<double> probs)
    : states_(std::move(states)), actions_(std::move(actions)), probs_(std::move(probs)) {
  if (!states_ || !actions_) throw UsageError("policy: null space");
  const std::size_t na = actions_->size();
  if (probs_.size() != states_->size() * na) throw UsageError("policy: size mismatch");
  for (std::size_t s = 0; s < states_->size(); ++s)
    normalize_weights(std::span<double>(probs_.data() + s * na, na));
}

Policy Policy::uniform(SpacePtr states, SpacePtr actions) {
  const std::size_t n = states->size() * actions->size();
  const double p = 1.0 / static_cast<double>(actions->size());
  return Policy(std::move(states), std::move(actions), std::vector<double>(n, p));
}

Distribution Policy::row_distribution(std::size_t s) const {
  const auto r = row(s);
  return Distribution(actions_, std::vector<double>(r.begin(), r.end()));
}

QTable::QTable(std::size_t states, std::size_t actions, double init)
    : states_(states), actions_(actions), values_(states * actions, init),
      visits_(states * actions, 0) {
  if (states == 0 || actions == 0) throw UsageError("QTable: empty shape");
}

double QTable::blend(std::size_t s, std::size_t a, double target, double step_exponent) {
  const std::size_t idx = s * actions_ + a;
  const double beta = std::pow(static_cast<double>(visits_[idx] + 1), -step_exponent);
  values_[idx] = (1.0 - beta) * values_[idx] + beta * target;
  ++visits_[idx];
  return beta;
}

double QTable::row_max(std::size_t s) const {
  const auto r = row(s);
  return *std::max_element(r.begin(), r.end());
}

std::vector<double> QTable::state_values() const {
  std::vector<double> v(states_);
  for (std::size_t s = 0; s < states_; ++s) v[s] = row_max(s);
  return v;
}

}  // namespace gmfg
