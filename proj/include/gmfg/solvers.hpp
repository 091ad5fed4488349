#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmfg/distribution.hpp"
#include "gmfg/epsilon_net.hpp"
#include "gmfg/model.hpp"
#include "gmfg/rng.hpp"

namespace gmfg {

// Linear epsilon-greedy decay from `start` to `end` over the first
// `decay_fraction` of the inner run, then flat.
struct Exploration {
  double start = 1.0;
  double end = 0.05;
  double decay_fraction = 0.5;
  double at(std::size_t t, std::size_t T) const;
};

// trajectory: one behavior path, one update per step. synchronous: every
// step updates each (s, a) once from a fresh simulator draw, so T steps cost
// T |S| |A| samples.
enum class InnerMode { trajectory, synchronous };
std::string to_string(InnerMode mode);
InnerMode inner_mode_from_string(const std::string& name);

struct InnerConfig {
  std::size_t T = 2000;
  InnerMode mode = InnerMode::trajectory;
  double h = 0.87;
  Exploration explore;
  double q_init = 0.0;
  void validate() const;
};

// Greedy action with ties (within kTieTolerance) broken uniformly.
std::size_t greedy_action(std::span<const double> row, Rng& rng);
// One coin from `behavior`; on success a uniform action, else greedy_action.
std::size_t epsilon_greedy(std::span<const double> row, double eps, Rng& behavior);

// Tabular Q-learning on the MDP frozen at some population: T updates along
// one behavior trajectory, step size (#visits + 1)^-h per pair. Greedy ties
// are broken uniformly with the behavior stream; `env` drives the sampler.
QTable q_learning_inner(const TransitionSampler& sampler, std::size_t num_states,
                        std::size_t num_actions, double discount, std::size_t start_state,
                        const InnerConfig& cfg, Rng& behavior, Rng& env,
                        const QTable* warm_start = nullptr);

// Convenience: samples the start state from the population's state marginal
// and splits `rng` into behavior/environment streams.
QTable q_learning_inner(const GmfgModel& model, const JointDistribution& population,
                        const InnerConfig& cfg, Rng& rng, const QTable* warm_start = nullptr);

namespace kernels {

// Q(s,a) = R(s,a) + gamma * sum_s' P(s'|s,a) V(s'). Same per-entry
// arithmetic in both variants.
void bellman_sweep_serial(const MdpKernel& kernel, std::span<const double> V, std::span<double> Q);
void bellman_sweep_parallel(const MdpKernel& kernel, std::span<const double> V, std::span<double> Q);

}  // namespace kernels

// T synchronous sweeps from Q = 0.
QTable value_iteration(const MdpKernel& kernel, std::size_t T);

// ||Q_a - Q_b||_2 / ||Q_b||_2 over all entries.
double delta_q(const QTable& a, const QTable& reference);

struct Theorem2Schedule {
  std::size_t K = 0;
  double c = 0.0;
  std::vector<double> eps_k;
  std::vector<double> delta_k;
};

// K = ceil(2 max{(eta eps)^(-1/eta), log_dhat(eps / max{diam_S diam_A, 1}) + 1}),
// c = ln(1/eps) / (D eps^alpha), eps_k = (k+1)^-(1+eta), delta_k = delta / K.
Theorem2Schedule theorem2_schedule(double eps, double eta, double delta, double D, double alpha,
                                   double dhat, double diam_states = 1.0, double diam_actions = 1.0);

enum class Algorithm { gmf_q, gmf_v, naive };
std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

enum class ScheduleMode { fixed, theorem2 };

struct Theorem2Inputs {
  double eta = 1.0;
  double delta = 0.1;
  double D = 1.0;
  double alpha = 1.0;
  double dhat = 0.5;
};

struct OuterConfig {
  std::size_t K = 20;
  double c = 4.0;
  double epsilon = 0.01;
  NetMode net_mode = NetMode::quantized;
  std::optional<JointDistribution> initial;  // uniform when empty
  double stop_tol = 0.0;
  ScheduleMode schedule = ScheduleMode::fixed;
  Theorem2Inputs theorem2;
  bool warm_start = false;
  // Per-k inner iteration counts; overrides InnerConfig::T where given.
  std::vector<std::size_t> T_schedule;
  bool keep_q_history = false;
  void validate() const;
};

struct TraceRow {
  std::size_t k = 0;
  double w1_step = 0.0;
  double tv_step = 0.0;
  double linf_step = 0.0;
  double l1_step = 0.0;
  double mean_reward = 0.0;
  double min_action_gap = 0.0;
  double elapsed_ms = 0.0;
};

struct SolveResult {
  JointDistribution population;
  Policy policy;
  QTable q;
  std::vector<TraceRow> trace;
  std::vector<QTable> q_history;
  // Effective settings after any theorem2 schedule was applied.
  std::size_t K = 0;
  double c = 0.0;
};

SolveResult gmf_q(const GmfgModel& model, const InnerConfig& inner, const OuterConfig& outer, Rng& rng);
SolveResult gmf_v(const GmfgModel& model, std::size_t T, const OuterConfig& outer, Rng& rng);
SolveResult naive(const GmfgModel& model, const InnerConfig& inner, const OuterConfig& outer, Rng& rng);

}  // namespace gmfg
