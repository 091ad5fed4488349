#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "../support/oracles.hpp"
#include "gmfg/auction.hpp"
#include "gmfg/errors.hpp"
#include "gmfg/metrics.hpp"
#include "gmfg/solvers.hpp"

using namespace gmfg;

namespace {

std::shared_ptr<TabularModel> single_state(double r, double gamma) {
  auto one = EmbeddedSpace::integer_line(1);
  return std::make_shared<TabularModel>(
      one, one, gamma, std::abs(r), [](std::size_t, std::size_t, const JointDistribution&) { return std::vector<double>{1.0}; },
      [r](std::size_t, std::size_t, const JointDistribution&) { return r; });
}

// Two states with a dominant action per state regardless of L.
std::shared_ptr<TabularModel> dominant_model() {
  auto S = EmbeddedSpace::integer_line(2), A = EmbeddedSpace::integer_line(2);
  return std::make_shared<TabularModel>(
      S, A, 0.8, 2.0,
      [](std::size_t s, std::size_t a, const JointDistribution&) {
        // Action 0 stays, action 1 moves.
        std::vector<double> row(2, 0.1);
        row[a == 0 ? s : 1 - s] = 0.9;
        return row;
      },
      [](std::size_t s, std::size_t a, const JointDistribution& L) {
        const double crowd = 0.3 * L.state_marginal_weights()[s];
        if (s == 0) return (a == 1 ? 1.0 : 0.0) - crowd;
        return (a == 0 ? 1.0 : -1.0) - crowd;
      });
}

double sup_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST(QLearning, FirstStepCopiesReward) {
  auto model = single_state(0.7, 0.8);
  const auto L = JointDistribution::uniform(model->state_space(), model->action_space());
  InnerConfig cfg;
  cfg.T = 1;
  Rng rng(1);
  const auto q = q_learning_inner(*model, L, cfg, rng);
  EXPECT_DOUBLE_EQ(q.at(0, 0), 0.7);
  EXPECT_EQ(q.visits(0, 0), 1u);
}

TEST(QLearning, GeometricFixedPoint) {
  auto model = single_state(1.0, 0.8);
  const auto L = JointDistribution::uniform(model->state_space(), model->action_space());
  InnerConfig cfg;
  cfg.T = 100000;
  Rng rng(2);
  EXPECT_NEAR(q_learning_inner(*model, L, cfg, rng).at(0, 0), 5.0, 0.05);
}

TEST(QLearning, FrozenAuctionCloseToValueIteration) {
  auto model = exact_kernel({});
  const auto L = JointDistribution::uniform(model->state_space(), model->action_space());
  const auto qstar = value_iteration(model->kernel(L), 300);
  InnerConfig cfg;
  cfg.T = 100000;
  Rng rng(3);
  const auto q = q_learning_inner(*model, L, cfg, rng);
  EXPECT_LE(sup_diff(q.values(), qstar.values()), 0.1 * model->value_bound());
}

TEST(QLearning, StepSizeLawAlongTrajectory) {
  Rng mrng(4);
  auto model = make_random_model({3, 2, 0.2, 0.8}, mrng);
  const auto L = JointDistribution::uniform(model->state_space(), model->action_space());
  InnerConfig cfg;
  cfg.T = 5000;
  Rng rng(5);
  const auto q = q_learning_inner(*model, L, cfg, rng);
  std::uint64_t total = 0;
  for (auto v : q.visit_counts()) total += v;
  EXPECT_EQ(total, 5000u);
}

TEST(QLearning, SynchronousModeVisitsEveryPair) {
  Rng mrng(4);
  auto model = make_random_model({3, 2, 0.2, 0.8}, mrng);
  const auto L = JointDistribution::uniform(model->state_space(), model->action_space());
  InnerConfig cfg;
  cfg.T = 50;
  cfg.mode = InnerMode::synchronous;
  Rng rng(5);
  const auto q = q_learning_inner(*model, L, cfg, rng);
  for (auto v : q.visit_counts()) EXPECT_EQ(v, 50u);
}

TEST(QLearning, RejectsBadConfig) {
  InnerConfig cfg;
  cfg.h = 0.5;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg.h = 0.87;
  cfg.T = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(QLearning, NonFiniteRewardAborts) {
  struct NanSampler final : TransitionSampler {
    SampledTransition sample(std::size_t, std::size_t, Rng&) const override { return {std::nan(""), 0}; }
  } sampler;
  InnerConfig cfg;
  Rng b(1), e(2);
  EXPECT_THROW(q_learning_inner(sampler, 1, 1, 0.8, 0, cfg, b, e), ModelError);
}

TEST(ValueIteration, Basics) {
  auto model = single_state(1.0, 0.8);
  const auto k = model->kernel(JointDistribution::uniform(model->state_space(), model->action_space()));
  EXPECT_DOUBLE_EQ(value_iteration(k, 0).at(0, 0), 0.0);
  EXPECT_NEAR(value_iteration(k, 400).at(0, 0), 5.0, 1e-12);
}

TEST(ValueIteration, ContractionEnvelopeAndStepRatio) {
  Rng rng(6);
  for (int m = 0; m < 20; ++m) {
    auto model = make_random_model({4, 3, 0.4, 0.8}, rng);
    const auto k = model->kernel(JointDistribution::uniform(model->state_space(), model->action_space()));
    double prev_step = -1.0;
    for (std::size_t T = 1; T < 40; ++T) {
      const auto a = value_iteration(k, T), b = value_iteration(k, T + 1);
      const double step = sup_diff(a.values(), b.values());
      EXPECT_LE(step, std::pow(0.8, T) * model->value_bound() + 1e-12);
      if (prev_step >= 0.0) {
        EXPECT_LE(step, 0.8 * prev_step + 1e-13);
      }
      prev_step = step;
    }
  }
}

TEST(ValueIteration, MatchesReferenceOracle) {
  Rng rng(7);
  auto model = make_random_model({5, 4, 0.3, 0.9}, rng);
  const auto k = model->kernel(JointDistribution::uniform(model->state_space(), model->action_space()));
  EXPECT_LE(sup_diff(value_iteration(k, 600).values(), gmfg::testing::reference_q(k)), 1e-10);
}

TEST(ValueIteration, SerialAndParallelSweepsBitIdentical) {
  Rng rng(8);
  auto model = make_random_model({30, 6, 0.3, 0.9}, rng);
  const auto k = model->kernel(JointDistribution::uniform(model->state_space(), model->action_space()));
  std::vector<double> V(30);
  for (double& v : V) v = rng.uniform();
  std::vector<double> a(180), b(180);
  kernels::bellman_sweep_serial(k, V, a);
  kernels::bellman_sweep_parallel(k, V, b);
  EXPECT_EQ(a, b);
}

TEST(DeltaQ, Examples) {
  QTable a(2, 2), b(2, 2);
  for (std::size_t i = 0; i < 4; ++i) b.values()[i] = 1.0 + i;
  EXPECT_DOUBLE_EQ(delta_q(b, b), 0.0);
  for (std::size_t i = 0; i < 4; ++i) a.values()[i] = 2.0 * b.values()[i];
  EXPECT_DOUBLE_EQ(delta_q(a, b), 1.0);
  EXPECT_THROW(delta_q(a, QTable(2, 2)), UsageError);
  EXPECT_THROW(delta_q(a, QTable(1, 2)), UsageError);
}

TEST(Theorem2, Examples) {
  const auto s = theorem2_schedule(0.5, 1.0, 0.1, 1.0, 1.0, 1e-6);
  EXPECT_EQ(s.K, 4u);
  EXPECT_DOUBLE_EQ(s.eps_k[0], 1.0);
  EXPECT_DOUBLE_EQ(s.eps_k[1], 0.25);
  EXPECT_DOUBLE_EQ(s.delta_k[2], 0.1 / 4);
  EXPECT_NEAR(theorem2_schedule(0.1, 1.0, 0.1, 1.0, 1.0, 0.5).c, std::log(10.0) / 0.1, 1e-12);
  EXPECT_NEAR(std::log(10.0) / 0.1, 23.026, 5e-4);
  EXPECT_DOUBLE_EQ(theorem2_schedule(0.3, 0.5, 0.1, 1.0, 1.0, 0.5).eps_k[0], 1.0);
  EXPECT_THROW(theorem2_schedule(0.5, 1.0, 0.1, 1.0, 1.0, 1.0), UsageError);
  EXPECT_THROW(theorem2_schedule(0.5, 1.0, 0.1, 1.0, 1.0, 0.0), UsageError);
}

TEST(Outer, ZeroIterations) {
  auto model = exact_kernel({});
  OuterConfig o;
  o.K = 0;
  o.initial = JointDistribution::point_mass(model->state_space(), model->action_space(), 3, 2);
  Rng rng(9);
  InnerConfig in;
  for (auto r : {gmf_q(*model, in, o, rng), gmf_v(*model, 10, o, rng), naive(*model, in, o, rng)}) {
    EXPECT_EQ(r.population, *o.initial);
    EXPECT_TRUE(r.trace.empty());
  }
  const auto r = gmf_q(*model, in, o, rng);
  for (double p : r.policy.probabilities()) EXPECT_DOUBLE_EQ(p, 0.1);
}

TEST(Outer, BitReproducible) {
  auto model = exact_kernel({});
  OuterConfig o;
  o.K = 4;
  InnerConfig in;
  in.T = 500;
  for (int alg = 0; alg < 3; ++alg) {
    Rng r1(11), r2(11);
    auto run = [&](Rng& r) {
      if (alg == 0) return gmf_q(*model, in, o, r);
      if (alg == 1) return gmf_v(*model, 50, o, r);
      return naive(*model, in, o, r);
    };
    const auto a = run(r1), b = run(r2);
    EXPECT_EQ(a.population, b.population);
    EXPECT_EQ(a.policy, b.policy);
    ASSERT_EQ(a.trace.size(), b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
      EXPECT_EQ(a.trace[k].w1_step, b.trace[k].w1_step);
      EXPECT_EQ(a.trace[k].mean_reward, b.trace[k].mean_reward);
    }
  }
}

TEST(Outer, PolicyShapes) {
  auto model = exact_kernel({});
  OuterConfig o;
  o.K = 3;
  InnerConfig in;
  in.T = 500;
  Rng rng(12);
  for (double p : gmf_q(*model, in, o, rng).policy.probabilities()) EXPECT_GT(p, 0.0);
  for (double p : gmf_v(*model, 50, o, rng).policy.probabilities()) EXPECT_GT(p, 0.0);
  const auto nv = naive(*model, in, o, rng);
  for (std::size_t s = 0; s < nv.policy.num_states(); ++s) {
    const auto row = nv.policy.row(s);
    const double top = *std::max_element(row.begin(), row.end());
    for (double p : row) EXPECT_TRUE(p == 0.0 || std::abs(p - top) < 1e-15);
  }
  // Projection keeps every GMF-Q iterate on the grid.
  const auto r = gmf_q(*model, in, o, rng);
  const double m = std::ceil(100 / (2 * o.epsilon));
  for (double w : r.population.weights()) EXPECT_NEAR(w * m, std::round(w * m), 1e-7);
}

TEST(Outer, EarlyStop) {
  Rng mrng(13);
  auto model = make_random_model({3, 2, 0.0, 0.8}, mrng);
  OuterConfig o;
  o.K = 200;
  o.stop_tol = 1e-3;
  Rng rng(14);
  const auto r = gmf_v(*model, 200, o, rng);
  EXPECT_LT(r.trace.size(), 200u);
  EXPECT_LE(r.trace.back().w1_step, 1e-3);
}

TEST(Outer, Theorem2ModeOverridesKAndC) {
  Rng mrng(13);
  auto model = make_random_model({3, 2, 0.2, 0.8}, mrng);
  OuterConfig o;
  o.schedule = ScheduleMode::theorem2;
  o.epsilon = 0.5;
  o.theorem2.dhat = 1e-6;
  Rng rng(15);
  const auto r = gmf_v(*model, 50, o, rng);
  EXPECT_EQ(r.K, 4u);
  EXPECT_EQ(r.trace.size(), 4u);
  EXPECT_NEAR(r.c, std::log(2.0) / 0.5, 1e-12);
}

// L-independent model: the fixed point is the stationary joint of the
// softmax policy built from the optimal Q.
TEST(Outer, PopulationFreeModelReachesStationaryJoint) {
  Rng mrng(16);
  auto model = make_random_model({3, 2, 0.0, 0.8}, mrng);
  const auto& S = model->state_space();
  const auto& A = model->action_space();
  const auto kernel = model->kernel(JointDistribution::uniform(S, A));
  const auto pi = gmfg::testing::softmax_rows(gmfg::testing::reference_q(kernel), 2, 4.0);
  const auto mu = gmfg::testing::stationary_states(kernel, pi);
  std::vector<double> w(6);
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) w[s * 2 + a] = mu[s] * pi[s * 2 + a];
  const JointDistribution target(S, A, w);

  OuterConfig o;
  o.K = 60;
  o.epsilon = 0.01;
  Rng rng(17);
  const auto v = gmf_v(*model, 200, o, rng);
  EXPECT_LE(w1_joint(v.population, target), 2 * o.epsilon);
  InnerConfig in;
  in.T = 100000;
  const auto q = gmf_q(*model, in, o, rng);
  EXPECT_LE(w1_joint(q.population, target), 2 * o.epsilon);
}

TEST(Outer, NaiveStableWithDominantActions) {
  auto model = dominant_model();
  OuterConfig o;
  o.K = 30;
  InnerConfig in;
  in.T = 20000;
  Rng rng(18);
  const auto r = naive(*model, in, o, rng);
  for (std::size_t s = 0; s < 2; ++s) EXPECT_DOUBLE_EQ(r.policy.at(s, s == 0 ? 1 : 0), 1.0);
  EXPECT_LE(r.trace.back().w1_step, 1e-9);
  // The argmax chain's stationary law: from 0 play 1 (move), from 1 play 0 (stay).
  const auto kernel = model->kernel(r.population);
  const std::vector<double> pi{0, 1, 1, 0};
  const auto mu = gmfg::testing::stationary_states(kernel, pi);
  EXPECT_NEAR(r.population.state_marginal_weights()[0], mu[0], 1e-9);
  // GMF-V with a sharp softmax lands close by.
  OuterConfig sharp = o;
  sharp.c = 60.0;
  const auto v = gmf_v(*model, 200, sharp, rng);
  EXPECT_LE(w1_joint(v.population, r.population), 2 * sharp.epsilon);
}
