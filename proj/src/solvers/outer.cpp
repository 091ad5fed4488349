#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "gmfg/errors.hpp"
#include "gmfg/metrics.hpp"
#include "gmfg/policy_ops.hpp"
#include "gmfg/propagate.hpp"
#include "gmfg/solvers.hpp"

namespace gmfg {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::gmf_q: return "gmf_q";
    case Algorithm::gmf_v: return "gmf_v";
    case Algorithm::naive: return "naive";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "gmf_q") return Algorithm::gmf_q;
  if (name == "gmf_v") return Algorithm::gmf_v;
  if (name == "naive") return Algorithm::naive;
  throw UsageError("unknown algorithm '" + name + "'");
}

void OuterConfig::validate() const {
  if (!(c > 0.0)) throw UsageError("outer: c must be positive");
  if (!(stop_tol >= 0.0)) throw UsageError("outer: stop_tol must be >= 0");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("outer: epsilon must lie in (0, 1)");
}

namespace {

using InnerStep = std::function<QTable(const JointDistribution&, std::size_t k, const QTable* prev, Rng&)>;

struct LoopSpec {
  bool softmax = true;
  bool project = true;
};

double min_gap(const QTable& q) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < q.num_states(); ++s) g = std::min(g, action_gap(q.row(s)));
  return g;
}

SolveResult outer_loop(const GmfgModel& model, const OuterConfig& outer, const LoopSpec& spec,
                       const InnerStep& inner, Rng& rng) {
  outer.validate();
  const auto& S = model.state_space();
  const auto& A = model.action_space();
  std::size_t K = outer.K;
  double c = outer.c;
  if (outer.schedule == ScheduleMode::theorem2) {
    const auto& t = outer.theorem2;
    const auto sched = theorem2_schedule(outer.epsilon, t.eta, t.delta, t.D, t.alpha, t.dhat,
                                         S->diameter(), A->diameter());
    K = sched.K;
    c = sched.c;
  }
  JointDistribution L = outer.initial.value_or(JointDistribution::uniform(S, A));
  if (!same_space(L.state_space(), S) || !same_space(L.action_space(), A))
    throw UsageError("solver: initial population does not match the model spaces");
  std::optional<EpsilonNet> net;
  if (spec.project) net = EpsilonNet::build(S->size(), A->size(), outer.epsilon, outer.net_mode);

  QTable q(S->size(), A->size());
  auto make_policy = [&](const QTable& table) {
    return spec.softmax ? softmax_policy(table, c, S, A) : argmax_policy(table, S, A);
  };
  SolveResult result{L, make_policy(q), q, {}, {}, K, c};

  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < K; ++k) {
    Rng inner_rng = rng.split(Stream::inner, k);
    q = inner(L, k, outer.warm_start && k > 0 ? &q : nullptr, inner_rng);
    const Policy pi = make_policy(q);

    Rng rep = rng.split(Stream::representative, k);
    const std::size_t s = rep.categorical(L.state_marginal_weights());
    auto step = simulator_step(model, s, pi, L, rep);
    JointDistribution next = net ? net->project(step.next_population) : std::move(step.next_population);

    TraceRow row;
    row.k = k;
    row.w1_step = w1_joint(next, L);
    row.tv_step = tv_joint(next, L);
    row.linf_step = linf_joint(next, L);
    row.l1_step = l1_joint(next, L);
    row.mean_reward = step.reward;
    row.min_action_gap = min_gap(q);
    row.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    result.trace.push_back(row);
    if (outer.keep_q_history) result.q_history.push_back(q);

    L = std::move(next);
    result.policy = pi;
    if (outer.stop_tol > 0.0 && row.w1_step <= outer.stop_tol) break;
  }
  result.population = std::move(L);
  result.q = std::move(q);
  return result;
}

std::size_t inner_T(const OuterConfig& outer, std::size_t base, std::size_t k) {
  return k < outer.T_schedule.size() ? outer.T_schedule[k] : base;
}

}  // namespace

SolveResult gmf_q(const GmfgModel& model, const InnerConfig& inner, const OuterConfig& outer, Rng& rng) {
  inner.validate();
  return outer_loop(model, outer, {true, true},
                    [&](const JointDistribution& L, std::size_t k, const QTable* prev, Rng& r) {
                      InnerConfig cfg = inner;
                      cfg.T = inner_T(outer, inner.T, k);
                      return q_learning_inner(model, L, cfg, r, prev);
                    },
                    rng);
}

SolveResult gmf_v(const GmfgModel& model, std::size_t T, const OuterConfig& outer, Rng& rng) {
  return outer_loop(model, outer, {true, true},
                    [&](const JointDistribution& L, std::size_t k, const QTable*, Rng&) {
                      return value_iteration(model.kernel(L), inner_T(outer, T, k));
                    },
                    rng);
}

SolveResult naive(const GmfgModel& model, const InnerConfig& inner, const OuterConfig& outer, Rng& rng) {
  inner.validate();
  return outer_loop(model, outer, {false, false},
                    [&](const JointDistribution& L, std::size_t k, const QTable* prev, Rng& r) {
                      InnerConfig cfg = inner;
                      cfg.T = inner_T(outer, inner.T, k);
                      return q_learning_inner(model, L, cfg, r, prev);
                    },
                    rng);
}

}  // namespace gmfg
