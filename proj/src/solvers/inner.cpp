#include <algorithm>
#include <cmath>
#include <string>

#include "gmfg/errors.hpp"
#include "gmfg/policy_ops.hpp"
#include "gmfg/solvers.hpp"

namespace gmfg {

double Exploration::at(std::size_t t, std::size_t T) const {
  const double horizon = decay_fraction * static_cast<double>(T);
  if (horizon <= 0.0 || static_cast<double>(t) >= horizon) return end;
  return start + (end - start) * (static_cast<double>(t) / horizon);
}

std::string to_string(InnerMode mode) {
  return mode == InnerMode::trajectory ? "trajectory" : "synchronous";
}

InnerMode inner_mode_from_string(const std::string& name) {
  if (name == "trajectory") return InnerMode::trajectory;
  if (name == "synchronous") return InnerMode::synchronous;
  throw UsageError("unknown inner mode '" + name + "'");
}

void InnerConfig::validate() const {
  if (T < 1) throw UsageError("inner: T must be >= 1");
  if (!(h > 0.5 && h < 1.0)) throw UsageError("inner: h must lie in (0.5, 1)");
  if (!(explore.start >= 0.0 && explore.start <= 1.0 && explore.end >= 0.0 && explore.end <= 1.0))
    throw UsageError("inner: exploration rates must lie in [0, 1]");
  if (!std::isfinite(q_init)) throw UsageError("inner: q_init must be finite");
}

std::size_t greedy_action(std::span<const double> row, Rng& rng) {
  const double best = *std::max_element(row.begin(), row.end());
  std::size_t ties = 0;
  for (double q : row) ties += (q >= best - kTieTolerance);
  if (ties == 1) return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  std::size_t pick = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(ties)));
  for (std::size_t a = 0; a < row.size(); ++a)
    if (row[a] >= best - kTieTolerance && pick-- == 0) return a;
  return 0;
}

std::size_t epsilon_greedy(std::span<const double> row, double eps, Rng& behavior) {
  if (behavior.uniform() < eps) return static_cast<std::size_t>(behavior.uniform_int(static_cast<int>(row.size())));
  return greedy_action(row, behavior);
}

QTable q_learning_inner(const TransitionSampler& sampler, std::size_t num_states,
                        std::size_t num_actions, double discount, std::size_t start_state,
                        const InnerConfig& cfg, Rng& behavior, Rng& env, const QTable* warm_start) {
  cfg.validate();
  if (start_state >= num_states) throw UsageError("q_learning: start state out of range");
  QTable q(num_states, num_actions, cfg.q_init);
  if (warm_start) {
    if (warm_start->num_states() != num_states || warm_start->num_actions() != num_actions)
      throw UsageError("q_learning: warm start shape mismatch");
    std::copy(warm_start->values().begin(), warm_start->values().end(), q.values().begin());
  }
  auto update = [&](std::size_t s, std::size_t a, const SampledTransition& tr, std::size_t t) {
    if (!std::isfinite(tr.reward))
      throw ModelError("q_learning: non-finite reward at step " + std::to_string(t) + " (s=" +
                       std::to_string(s) + ", a=" + std::to_string(a) + ")");
    if (tr.next_state >= num_states) throw ModelError("q_learning: sampler returned an invalid state");
    q.blend(s, a, tr.reward + discount * q.row_max(tr.next_state), cfg.h);
  };
  if (cfg.mode == InnerMode::synchronous) {
    for (std::size_t t = 0; t < cfg.T; ++t)
      for (std::size_t s = 0; s < num_states; ++s)
        for (std::size_t a = 0; a < num_actions; ++a) update(s, a, sampler.sample(s, a, env), t);
    return q;
  }
  std::size_t s = start_state;
  for (std::size_t t = 0; t < cfg.T; ++t) {
    const double eps = cfg.explore.at(t, cfg.T);
    const std::size_t a = epsilon_greedy(q.row(s), eps, behavior);
    const SampledTransition tr = sampler.sample(s, a, env);
    update(s, a, tr, t);
    s = tr.next_state;
  }
  return q;
}

QTable q_learning_inner(const GmfgModel& model, const JointDistribution& population,
                        const InnerConfig& cfg, Rng& rng, const QTable* warm_start) {
  Rng init = rng.split(Stream::init);
  Rng behavior = rng.split(Stream::behavior);
  Rng env = rng.split(Stream::environment);
  const auto mu = population.state_marginal_weights();
  const std::size_t s0 = init.categorical(mu);
  const auto sampler = model.sampler(population);
  return q_learning_inner(*sampler, model.num_states(), model.num_actions(), model.discount(), s0, cfg,
                          behavior, env, warm_start);
}

namespace kernels {

void bellman_sweep_serial(const MdpKernel& kernel, std::span<const double> V, std::span<double> Q) {
  const std::size_t ns = kernel.num_states, na = kernel.num_actions;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      const auto row = kernel.next(s, a);
      double acc = 0.0;
      for (std::size_t t = 0; t < ns; ++t) acc += row[t] * V[t];
      Q[s * na + a] = kernel.expected_reward(s, a) + kernel.discount * acc;
    }
  }
}

void bellman_sweep_parallel(const MdpKernel& kernel, std::span<const double> V, std::span<double> Q) {
  const std::size_t ns = kernel.num_states, na = kernel.num_actions;
  const std::ptrdiff_t cells = static_cast<std::ptrdiff_t>(ns * na);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < cells; ++i) {
    const std::size_t s = static_cast<std::size_t>(i) / na, a = static_cast<std::size_t>(i) % na;
    const auto row = kernel.next(s, a);
    double acc = 0.0;
    for (std::size_t t = 0; t < ns; ++t) acc += row[t] * V[t];
    Q[i] = kernel.expected_reward(s, a) + kernel.discount * acc;
  }
}

}  // namespace kernels

QTable value_iteration(const MdpKernel& kernel, std::size_t T) {
  kernel.validate();
  QTable q(kernel.num_states, kernel.num_actions);
  std::vector<double> V(kernel.num_states, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t s = 0; s < kernel.num_states; ++s) V[s] = q.row_max(s);
    kernels::bellman_sweep_parallel(kernel, V, q.values());
  }
  return q;
}

double delta_q(const QTable& a, const QTable& reference) {
  if (a.num_states() != reference.num_states() || a.num_actions() != reference.num_actions())
    throw UsageError("delta_q: shape mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    const double d = a.values()[i] - reference.values()[i];
    num += d * d;
    den += reference.values()[i] * reference.values()[i];
  }
  if (den == 0.0) throw UsageError("delta_q: reference table has zero norm");
  return std::sqrt(num / den);
}

Theorem2Schedule theorem2_schedule(double eps, double eta, double delta, double D, double alpha,
                                   double dhat, double diam_states, double diam_actions) {
  if (!(eps > 0.0 && eps <= 1.0)) throw UsageError("theorem2: epsilon must lie in (0, 1]");
  if (!(eta > 0.0 && eta <= 1.0)) throw UsageError("theorem2: eta must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= 1.0)) throw UsageError("theorem2: delta must lie in (0, 1]");
  if (!(D > 0.0 && alpha > 0.0)) throw UsageError("theorem2: D and alpha must be positive");
  if (!(dhat > 0.0 && dhat < 1.0)) throw UsageError("theorem2: contraction estimate must lie in (0, 1)");
  const double first = std::pow(eta * eps, -1.0 / eta);
  const double scale = std::max(diam_states * diam_actions, 1.0);
  const double second = std::log(eps / scale) / std::log(dhat) + 1.0;
  Theorem2Schedule out;
  out.K = static_cast<std::size_t>(std::ceil(2.0 * std::max(first, second) - 1e-12));
  out.c = std::log(1.0 / eps) / (D * std::pow(eps, alpha));
  for (std::size_t k = 0; k < out.K; ++k) {
    out.eps_k.push_back(std::pow(static_cast<double>(k + 1), -(1.0 + eta)));
    out.delta_k.push_back(delta / static_cast<double>(out.K));
  }
  return out;
}

}  // namespace gmfg
