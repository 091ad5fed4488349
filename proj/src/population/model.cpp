#include "gmfg/model.hpp"

#include <cmath>
#include <string>

#include "gmfg/errors.hpp"

namespace gmfg {

MdpKernel::MdpKernel(std::size_t states, std::size_t actions, double gamma)
    : num_states(states), num_actions(actions), discount(gamma),
      transition(states * actions * states, 0.0), reward(states * actions, 0.0) {}

void MdpKernel::validate() const {
  for (std::size_t s = 0; s < num_states; ++s) {
    for (std::size_t a = 0; a < num_actions; ++a) {
      if (!std::isfinite(expected_reward(s, a)))
        throw ModelError("kernel: non-finite reward at (" + std::to_string(s) + "," +
                         std::to_string(a) + ")");
      double total = 0.0;
      for (double p : next(s, a)) {
        if (!(p >= -kNormTolerance) || !std::isfinite(p))
          throw ModelError("kernel: invalid transition probability");
        total += p;
      }
      if (std::abs(total - 1.0) > kRenormalizeLimit)
        throw ModelError("kernel: transition row (" + std::to_string(s) + "," + std::to_string(a) +
                         ") sums to " + std::to_string(total));
    }
  }
}

SampledTransition KernelSampler::sample(std::size_t s, std::size_t a, Rng& rng) const {
  return {kernel_.expected_reward(s, a), rng.categorical(kernel_.next(s, a))};
}

std::unique_ptr<TransitionSampler> GmfgModel::sampler(const JointDistribution& population) const {
  return std::make_unique<KernelSampler>(kernel(population));
}

TabularModel::TabularModel(SpacePtr states, SpacePtr actions, double discount,
                           double reward_spread, TransitionFn transition, RewardFn reward)
    : states_(std::move(states)), actions_(std::move(actions)), discount_(discount),
      reward_spread_(reward_spread), transition_(std::move(transition)), reward_(std::move(reward)) {
  if (!(discount_ > 0.0 && discount_ < 1.0)) throw UsageError("model: discount must lie in (0,1)");
  if (!(reward_spread_ >= 0.0)) throw UsageError("model: reward spread must be nonnegative");
}

MdpKernel TabularModel::kernel(const JointDistribution& population) const {
  const std::size_t ns = states_->size();
  const std::size_t na = actions_->size();
  MdpKernel k(ns, na, discount_);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      const auto row = transition_(s, a, population);
      if (row.size() != ns) throw ModelError("model: transition row has wrong length");
      std::copy(row.begin(), row.end(), k.next(s, a).begin());
      k.reward[s * na + a] = reward_(s, a, population);
    }
  }
  k.validate();
  return k;
}

std::shared_ptr<TabularModel> make_random_model(const RandomModelSpec& spec, Rng& rng) {
  const std::size_t ns = spec.states, na = spec.actions;
  auto draw_rows = [&] {
    std::vector<double> p(ns * na * ns);
    for (std::size_t r = 0; r < ns * na; ++r) {
      double total = 0.0;
      for (std::size_t j = 0; j < ns; ++j) total += (p[r * ns + j] = rng.exponential());
      for (std::size_t j = 0; j < ns; ++j) p[r * ns + j] /= total;
    }
    return p;
  };
  auto p0 = draw_rows();
  auto p1 = draw_rows();
  std::vector<double> r0(ns * na);
  for (double& r : r0) r = rng.uniform();

  auto states = EmbeddedSpace::integer_line(static_cast<int>(ns));
  auto actions = EmbeddedSpace::integer_line(static_cast<int>(na));
  const double coupling = spec.coupling;
  const double top_action = na > 1 ? static_cast<double>(na - 1) : 1.0;

  auto transition = [=](std::size_t s, std::size_t a, const JointDistribution& L) {
    const auto alpha = L.action_marginal_weights();
    double mean = 0.0;
    for (std::size_t b = 0; b < alpha.size(); ++b) mean += alpha[b] * static_cast<double>(b);
    const double lambda = coupling * mean / top_action;
    std::vector<double> row(ns);
    for (std::size_t j = 0; j < ns; ++j) {
      const std::size_t idx = (s * na + a) * ns + j;
      row[j] = (1.0 - lambda) * p0[idx] + lambda * p1[idx];
    }
    return row;
  };
  auto reward = [=](std::size_t s, std::size_t a, const JointDistribution& L) {
    double mu = 0.0;
    for (std::size_t b = 0; b < na; ++b) mu += L.at(s, b);
    return r0[s * na + a] - coupling * mu;
  };
  return std::make_shared<TabularModel>(states, actions, spec.discount, 1.0 + coupling,
                                        std::move(transition), std::move(reward));
}

}  // namespace gmfg
