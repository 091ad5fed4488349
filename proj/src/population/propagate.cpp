#include "gmfg/propagate.hpp"

#include <algorithm>

#include "gmfg/errors.hpp"
#include "gmfg/parallel.hpp"

namespace gmfg {

namespace kernels {

void propagate_serial(const MdpKernel& kernel, std::span<const double> policy,
                      std::span<const double> mu, std::span<double> next_mu) {
  const std::size_t ns = kernel.num_states, na = kernel.num_actions;
  std::fill(next_mu.begin(), next_mu.end(), 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      const double w = mu[s] * policy[s * na + a];
      const auto row = kernel.next(s, a);
      for (std::size_t t = 0; t < ns; ++t) next_mu[t] += w * row[t];
    }
  }
}

void propagate_parallel(const MdpKernel& kernel, std::span<const double> policy,
                        std::span<const double> mu, std::span<double> next_mu) {
  const std::size_t ns = kernel.num_states, na = kernel.num_actions;
  // One contiguous block of target states per thread; each block keeps the
  // serial (s, a) summation order per target, so blocking is invisible.
  const std::size_t threads = static_cast<std::size_t>(std::max(1, max_threads()));
  const std::size_t block = std::max<std::size_t>(1, (ns + threads - 1) / threads);
  const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>((ns + block - 1) / block);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block, hi = std::min(ns, lo + block);
    std::fill(next_mu.begin() + lo, next_mu.begin() + hi, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        const double w = mu[s] * policy[s * na + a];
        const auto row = kernel.next(s, a);
        for (std::size_t t = lo; t < hi; ++t) next_mu[t] += w * row[t];
      }
    }
  }
}

}  // namespace kernels

JointDistribution propagate(const MdpKernel& kernel, const Policy& policy,
                            const JointDistribution& population) {
  if (!same_space(policy.state_space(), population.state_space()) ||
      !same_space(policy.action_space(), population.action_space()))
    throw UsageError("propagate: policy and population spaces differ");
  if (kernel.num_states != population.num_states() || kernel.num_actions != population.num_actions())
    throw UsageError("propagate: kernel shape does not match population");
  kernel.validate();

  const auto mu = population.state_marginal_weights();
  std::vector<double> next_mu(mu.size());
  kernels::propagate_parallel(kernel, policy.probabilities(), mu, next_mu);

  const std::size_t na = population.num_actions();
  std::vector<double> w(mu.size() * na);
  for (std::size_t s = 0; s < mu.size(); ++s)
    for (std::size_t a = 0; a < na; ++a) w[s * na + a] = next_mu[s] * policy.at(s, a);
  return JointDistribution(population.state_space(), population.action_space(), std::move(w));
}

JointDistribution propagate(const GmfgModel& model, const Policy& policy,
                            const JointDistribution& population) {
  return propagate(model.kernel(population), policy, population);
}

SimulatorStep simulator_step(const GmfgModel& model, std::size_t state, const Policy& policy,
                             const JointDistribution& population, Rng& rng) {
  if (state >= model.num_states()) throw UsageError("simulator_step: state out of range");
  const std::size_t action = rng.categorical(policy.row(state));
  const auto sampler = model.sampler(population);
  const SampledTransition tr = sampler->sample(state, action, rng);
  return {action, tr.next_state, tr.reward, propagate(model, policy, population)};
}

}  // namespace gmfg
