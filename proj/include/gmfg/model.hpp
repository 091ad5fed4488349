#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gmfg/distribution.hpp"
#include "gmfg/rng.hpp"

namespace gmfg {

// The MDP obtained by freezing the population at some L: dense transition
// tensor P[s][a][s'] and expected rewards R[s][a].
struct MdpKernel {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  double discount = 0.0;
  std::vector<double> transition;
  std::vector<double> reward;

  MdpKernel() = default;
  MdpKernel(std::size_t states, std::size_t actions, double gamma);

  std::span<const double> next(std::size_t s, std::size_t a) const {
    return {transition.data() + (s * num_actions + a) * num_states, num_states};
  }
  std::span<double> next(std::size_t s, std::size_t a) {
    return {transition.data() + (s * num_actions + a) * num_states, num_states};
  }
  double expected_reward(std::size_t s, std::size_t a) const { return reward[s * num_actions + a]; }

  // Throws ModelError on a row that is not a distribution or a non-finite reward.
  void validate() const;
};

struct SampledTransition {
  double reward;
  std::size_t next_state;
};

// Draws (r, s') for a fixed frozen population; what model-free learners see.
class TransitionSampler {
 public:
  virtual ~TransitionSampler() = default;
  virtual SampledTransition sample(std::size_t s, std::size_t a, Rng& rng) const = 0;
};

// Samples s' from an exact kernel and reports the expected reward.
class KernelSampler final : public TransitionSampler {
 public:
  explicit KernelSampler(MdpKernel kernel) : kernel_(std::move(kernel)) {}
  SampledTransition sample(std::size_t s, std::size_t a, Rng& rng) const override;
  const MdpKernel& kernel() const noexcept { return kernel_; }

 private:
  MdpKernel kernel_;
};

// A general mean-field game: transition and reward depend on (s, a, L).
class GmfgModel {
 public:
  virtual ~GmfgModel() = default;

  virtual const SpacePtr& state_space() const = 0;
  virtual const SpacePtr& action_space() const = 0;
  virtual double discount() const = 0;
  // Declared R_max: an upper bound on max - min of any reward.
  virtual double reward_spread() const = 0;

  virtual MdpKernel kernel(const JointDistribution& population) const = 0;
  virtual std::unique_ptr<TransitionSampler> sampler(const JointDistribution& population) const;

  std::size_t num_states() const { return state_space()->size(); }
  std::size_t num_actions() const { return action_space()->size(); }
  // V_max = R_max / (1 - gamma).
  double value_bound() const { return reward_spread() / (1.0 - discount()); }
};

// Model given by callbacks; handy for toy and test problems.
class TabularModel final : public GmfgModel {
 public:
  using TransitionFn =
      std::function<std::vector<double>(std::size_t s, std::size_t a, const JointDistribution&)>;
  using RewardFn = std::function<double(std::size_t s, std::size_t a, const JointDistribution&)>;

  TabularModel(SpacePtr states, SpacePtr actions, double discount, double reward_spread,
               TransitionFn transition, RewardFn reward);

  const SpacePtr& state_space() const override { return states_; }
  const SpacePtr& action_space() const override { return actions_; }
  double discount() const override { return discount_; }
  double reward_spread() const override { return reward_spread_; }
  MdpKernel kernel(const JointDistribution& population) const override;

 private:
  SpacePtr states_;
  SpacePtr actions_;
  double discount_;
  double reward_spread_;
  TransitionFn transition_;
  RewardFn reward_;
};

// Random finite model with population coupling strength `coupling` in [0, 1]:
// P = (1 - lambda(L)) P0 + lambda(L) P1 with lambda the normalized mean
// action, and r = r0(s, a) - coupling * mu(s). coupling = 0 gives an
// L-independent model. Rewards lie in [-coupling, 1].
struct RandomModelSpec {
  std::size_t states = 3;
  std::size_t actions = 2;
  double coupling = 0.3;
  double discount = 0.8;
};
std::shared_ptr<TabularModel> make_random_model(const RandomModelSpec& spec, Rng& rng);

}  // namespace gmfg
