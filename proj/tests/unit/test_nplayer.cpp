#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "../support/oracles.hpp"
#include "gmfg/errors.hpp"
#include "gmfg/exploitability.hpp"
#include "gmfg/metrics.hpp"
#include "gmfg/nplayer.hpp"
#include "gmfg/policy_ops.hpp"

using namespace gmfg;
using namespace gmfg::nplayer;

namespace {

AuctionParams small_params(int s_max, int M) {
  AuctionParams p;
  p.s_max = s_max;
  p.M = M;
  return p;
}

std::vector<Rng> streams(std::size_t n, std::uint64_t seed) {
  std::vector<Rng> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Rng(seed).split(Stream::players, i));
  return out;
}

Policy random_policy(const AuctionModel& m, Rng& rng) {
  const std::size_t ns = m.num_states(), na = m.num_actions();
  std::vector<double> w(ns * na);
  for (std::size_t s = 0; s < ns; ++s) {
    double t = 0.0;
    for (std::size_t a = 0; a < na; ++a) t += (w[s * na + a] = rng.exponential());
    for (std::size_t a = 0; a < na; ++a) w[s * na + a] /= t;
  }
  return Policy(m.state_space(), m.action_space(), w);
}

// Two players, three states and actions. r_i = u(a_i) + a_j / 2 with
// u = (0, 1/2, 1), so action 2 is dominant; the next state is the own action.
class DominantGame final : public FiniteGame {
 public:
  std::size_t num_players() const override { return 2; }
  std::size_t num_states() const override { return 3; }
  std::size_t num_actions() const override { return 3; }
  double discount() const override { return 0.9; }
  void transition(std::span<const std::size_t>, std::span<const std::size_t> a, std::span<double> r,
                  std::span<double> next) const override {
    const double u[3] = {0.0, 0.5, 1.0};
    r[0] = u[a[0]] + 0.5 * static_cast<double>(a[1]);
    r[1] = u[a[1]] + 0.5 * static_cast<double>(a[0]);
    std::fill(next.begin(), next.end(), 0.0);
    next[a[0] * 3 + a[1]] = 1.0;
  }
};

Policy constant_policy(std::size_t ns, std::size_t na, std::size_t action) {
  auto S = EmbeddedSpace::integer_line(static_cast<int>(ns));
  auto A = EmbeddedSpace::integer_line(static_cast<int>(na));
  std::vector<double> w(ns * na, 0.0);
  for (std::size_t s = 0; s < ns; ++s) w[s * na + action] = 1.0;
  return Policy(S, A, w);
}

// Brute force over every m-subset and every opposing bid tuple.
WinLaw brute_subset_law(std::size_t bid, const std::vector<std::vector<double>>& alphas, std::size_t m) {
  const std::size_t n = alphas.size(), K = alphas[0].size();
  WinLaw law;
  law.win_at.assign(K, 0.0);
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask))) != m) continue;
    std::vector<std::size_t> sub;
    for (std::size_t j = 0; j < n; ++j)
      if (mask >> j & 1u) sub.push_back(j);
    subsets.push_back(sub);
  }
  for (const auto& sub : subsets) {
    std::vector<std::size_t> idx(m, 0);
    for (;;) {
      double p = 1.0 / static_cast<double>(subsets.size());
      std::size_t top = 0;
      for (std::size_t k = 0; k < m; ++k) {
        p *= alphas[sub[k]][idx[k]];
        top = std::max(top, idx[k]);
      }
      if (bid > top) law.win_at[top] += p;
      else if (bid == top) {
        int t = 0;
        for (auto i : idx) t += (i == top);
        law.win_at[bid] += p / (1.0 + t);
      }
      std::size_t d = 0;
      while (d < m && ++idx[d] == K) idx[d++] = 0;
      if (d == m) break;
    }
  }
  law.lose = 1.0 - law.win_probability();
  return law;
}

}  // namespace

TEST(NPlayerStep, TwoPlayerExample) {
  for (auto mode : {ClearingMode::per_player, ClearingMode::single}) {
    AuctionGame game(AuctionParams{}, 2, mode);
    const std::vector<std::size_t> s{5, 5}, b{3, 1};
    Rng shared(3);
    auto per = streams(2, 4);
    const auto out = nplayer_step(game, s, b, shared, per);
    EXPECT_TRUE(out.won[0]);
    EXPECT_FALSE(out.won[1]);
    EXPECT_DOUBLE_EQ(out.prices[0], 1.0);
    EXPECT_DOUBLE_EQ(out.rewards[1], 0.0);
    EXPECT_GE(out.rewards[0], 0.0);
    EXPECT_LE(out.rewards[0], 3.0);
    EXPECT_TRUE(out.next_states[0] == 4 || out.next_states[0] == 5);
    EXPECT_TRUE(out.next_states[1] == 5 || out.next_states[1] == 6);
  }
}

TEST(NPlayerStep, SingleClearingSelection) {
  AuctionGame game(small_params(9, 2), 4, ClearingMode::single);
  const std::vector<std::size_t> s{9, 9, 9, 9}, b{2, 2, 4, 1};
  std::vector<std::size_t> first;
  for (int rep = 0; rep < 2; ++rep) {
    Rng shared(11);
    auto per = streams(4, 12);
    const auto out = nplayer_step(game, s, b, shared, per);
    ASSERT_EQ(out.selected.size(), 2u);
    if (rep == 0) first = out.selected;
    else EXPECT_EQ(out.selected, first);
    int winners = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      winners += out.won[i];
      const bool in = std::find(out.selected.begin(), out.selected.end(), i) != out.selected.end();
      if (!in) {
        EXPECT_FALSE(out.won[i]);
        EXPECT_EQ(out.next_states[i], 9u);
        EXPECT_DOUBLE_EQ(out.rewards[i], 0.0);
      }
    }
    EXPECT_EQ(winners, 1);
  }
  // Over many rounds each pair is drawn about equally often.
  std::map<std::vector<std::size_t>, int> seen;
  Rng shared(5);
  auto per = streams(4, 6);
  for (int t = 0; t < 60000; ++t) seen[nplayer_step(game, s, b, shared, per).selected]++;
  ASSERT_EQ(seen.size(), 6u);
  for (const auto& [pair, n] : seen) EXPECT_NEAR(n / 60000.0, 1.0 / 6.0, 0.01);
}

TEST(NPlayerStep, RejectsBadInput) {
  AuctionGame game(AuctionParams{}, 2);
  Rng shared(1);
  auto per = streams(2, 2);
  const std::vector<std::size_t> s{1}, b{1, 1}, bad{1, 99};
  EXPECT_THROW(nplayer_step(game, s, b, shared, per), UsageError);
  const std::vector<std::size_t> s2{1, 1};
  EXPECT_THROW(nplayer_step(game, s2, bad, shared, per), UsageError);
  EXPECT_THROW(AuctionGame(AuctionParams{}, 0), UsageError);
}

TEST(NPlayerStep, RewardsAndBudgetsStayInRange) {
  for (auto mode : {ClearingMode::per_player, ClearingMode::single}) {
    AuctionGame game(AuctionParams{}, 6, mode);
    const auto& p = game.params();
    const auto levels = p.bids();
    Rng pick(17), shared(18);
    auto per = streams(6, 19);
    double lo = 0.0, hi = 0.0;
    for (int t = 0; t < 20000; ++t) {
      std::vector<std::size_t> s(6), b(6);
      for (std::size_t i = 0; i < 6; ++i) {
        s[i] = static_cast<std::size_t>(pick.uniform_int(static_cast<int>(game.num_states())));
        b[i] = static_cast<std::size_t>(pick.uniform_int(static_cast<int>(game.num_actions())));
      }
      const auto out = nplayer_step(game, s, b, shared, per);
      for (std::size_t i = 0; i < 6; ++i) {
        ASSERT_LT(out.next_states[i], game.num_states());
        lo = std::min(lo, out.rewards[i]);
        hi = std::max(hi, out.rewards[i]);
        if (out.won[i]) {
          ASSERT_LE(out.prices[i], levels[b[i]]);
        }
      }
    }
    EXPECT_LE(hi - lo, game.model().reward_spread());
  }
}

TEST(SubsetWinLaw, MatchesIidLawWhenEveryoneIsDrawn) {
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> alpha(6);
    double t = 0.0;
    for (auto& x : alpha) t += (x = rng.exponential());
    for (auto& x : alpha) x /= t;
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(4));
    std::vector<std::vector<double>> alphas(n, alpha);
    for (std::size_t bid = 0; bid < 6; ++bid) {
      const auto a = subset_win_law(bid, alphas, n, 6);
      const auto b = win_law(bid, alpha, static_cast<int>(n));
      for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(a.win_at[k], b.win_at[k], 1e-12);
    }
  }
}

TEST(SubsetWinLaw, MatchesBruteForceOnHeterogeneousPools) {
  Rng rng(10);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(3));
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(n)));
    std::vector<std::vector<double>> alphas(n, std::vector<double>(4));
    for (auto& a : alphas) {
      double t = 0.0;
      for (auto& x : a) t += (x = rng.exponential());
      for (auto& x : a) x /= t;
    }
    const auto laws = subset_win_laws(alphas, m, 4);
    for (std::size_t bid = 0; bid < 4; ++bid) {
      const auto ref = brute_subset_law(bid, alphas, m);
      for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(laws[bid].win_at[k], ref.win_at[k], 1e-12);
      EXPECT_NEAR(laws[bid].lose, ref.lose, 1e-12);
    }
  }
}

TEST(AuctionGame, ExactTransitionMatchesSimulation) {
  for (auto mode : {ClearingMode::per_player, ClearingMode::single}) {
    AuctionGame game(small_params(2, 2), 3, mode);
    const std::vector<std::size_t> s{2, 0, 1}, b{1, 1, 2};
    std::vector<double> r(3), next(game.joint_size());
    game.transition(s, b, r, next);
    double mass = 0.0;
    for (double x : next) mass += x;
    EXPECT_NEAR(mass, 1.0, 1e-12);

    const int n = 400000;
    Rng shared(21);
    auto per = streams(3, 22);
    std::vector<double> freq(game.joint_size(), 0.0), rsum(3, 0.0), rsq(3, 0.0);
    for (int t = 0; t < n; ++t) {
      const auto out = nplayer_step(game, s, b, shared, per);
      freq[game.encode(out.next_states)] += 1.0 / n;
      for (int i = 0; i < 3; ++i) {
        rsum[i] += out.rewards[i];
        rsq[i] += out.rewards[i] * out.rewards[i];
      }
    }
    double tv = 0.0;
    for (std::size_t j = 0; j < next.size(); ++j) tv += 0.5 * std::abs(freq[j] - next[j]);
    EXPECT_LT(tv, 0.005) << to_string(mode);
    for (int i = 0; i < 3; ++i) {
      const double mean = rsum[i] / n;
      const double se = std::sqrt(std::max(rsq[i] / n - mean * mean, 1e-12) / n);
      EXPECT_NEAR(mean, r[i], 4.0 * se + 1e-9) << to_string(mode) << " player " << i;
    }
  }
}

TEST(IndependentLearners, OnePlayerMatchesSingleAgentLearner) {
  AuctionGame game(small_params(4, 5), 1);
  TrainConfig cfg;
  cfg.rounds = 5000;
  cfg.initial_states = {3};
  Rng root(77);
  const auto il = il_train(game, cfg, root);

  Rng player = root.split(Stream::players, 0);
  Rng behavior = player.split(Stream::behavior), env = player.split(Stream::environment);
  InnerConfig inner = cfg.inner;
  inner.T = cfg.rounds;
  SinglePlayerSampler sampler(game);
  const auto q = q_learning_inner(sampler, game.num_states(), game.num_actions(), game.discount(), 3, inner,
                                  behavior, env);
  ASSERT_EQ(il.tables.size(), 1u);
  for (std::size_t i = 0; i < q.values().size(); ++i) EXPECT_EQ(il.tables[0].values()[i], q.values()[i]);
  EXPECT_TRUE(std::equal(q.visit_counts().begin(), q.visit_counts().end(), il.tables[0].visit_counts().begin()));
}

TEST(IndependentLearners, SymmetricStreamsGiveIdenticalTables) {
  AuctionGame game(small_params(4, 2), 2);
  TrainConfig cfg;
  cfg.rounds = 4000;
  cfg.symmetric_streams = true;
  cfg.initial_states = {2, 2};
  Rng root(5);
  const auto il = il_train(game, cfg, root);
  for (std::size_t i = 0; i < il.tables[0].values().size(); ++i)
    EXPECT_EQ(il.tables[0].values()[i], il.tables[1].values()[i]);
  EXPECT_EQ(il.policies[0], il.policies[1]);
}

TEST(IndependentLearners, Deterministic) {
  AuctionGame game(small_params(4, 5), 6);
  TrainConfig cfg;
  cfg.rounds = 2000;
  Rng a(8), b(8);
  const auto x = il_train(game, cfg, a), y = il_train(game, cfg, b);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(x.policies[i], y.policies[i]);
}

TEST(MeanFieldQ, BinEdges) {
  EXPECT_EQ(mean_action_bin(0.0, 9.0, 10), 0u);
  EXPECT_EQ(mean_action_bin(0.89, 9.0, 10), 0u);
  EXPECT_EQ(mean_action_bin(0.9, 9.0, 10), 1u);
  EXPECT_EQ(mean_action_bin(4.5, 9.0, 10), 5u);
  EXPECT_EQ(mean_action_bin(9.0, 9.0, 10), 9u);
  EXPECT_EQ(mean_action_bin(5.0, 9.0, 1), 0u);
}

TEST(MeanFieldQ, OneBinReducesToIndependentLearners) {
  AuctionGame game(small_params(4, 3), 4);
  MfqConfig cfg;
  cfg.bins = 1;
  cfg.selection = MfqSelection::epsilon_greedy;
  cfg.train.rounds = 3000;
  Rng a(31), b(31);
  const auto mf = mfq_train(game, cfg, a);
  const auto il = il_train(game, cfg.train, b);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& x = mf.tables[i].by_bin[0].values();
    const auto& y = il.tables[i].values();
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(x[k], y[k]);
    EXPECT_EQ(mf.tables[i].bin_counts[0], 3000u);
  }
}

TEST(MeanFieldQ, PoliciesAreValidMixtures) {
  AuctionGame game(small_params(4, 5), 8);
  MfqConfig cfg;
  cfg.train.rounds = 3000;
  Rng rng(2);
  const auto mf = mfq_train(game, cfg, rng);
  ASSERT_EQ(mf.policies.size(), 8u);
  for (const auto& tab : mf.tables) {
    std::uint64_t total = 0;
    for (auto n : tab.bin_counts) total += n;
    EXPECT_EQ(total, 3000u);
  }
  for (const auto& p : mf.policies)
    for (std::size_t s = 0; s < p.num_states(); ++s) {
      double t = 0.0;
      for (double x : p.row(s)) t += x;
      EXPECT_NEAR(t, 1.0, 1e-12);
    }
  EXPECT_THROW(mfq_train(game, MfqConfig{.train = {}, .bins = 0}, rng), UsageError);
}

TEST(Exploitability, DominantStrategyGame) {
  DominantGame g;
  ExploitabilityConfig cfg;
  const std::vector<Policy> dominant{constant_policy(3, 3, 2), constant_policy(3, 3, 2)};
  EXPECT_NEAR(exploitability_exact(g, dominant, cfg).value, 0.0, 1e-9);
  // Against uniform play: V* = 1.5 / (1 - gamma) = 15, V = 10 in every state.
  auto S = EmbeddedSpace::integer_line(3);
  const std::vector<Policy> uniform{Policy::uniform(S, S), Policy::uniform(S, S)};
  const auto res = exploitability_exact(g, uniform, cfg);
  EXPECT_NEAR(res.value, 5.0 / 15.1, 1e-9);
  EXPECT_NEAR(res.mean_best_value, 15.0, 1e-9);
  EXPECT_NEAR(res.mean_policy_value, 10.0, 1e-9);
  // Player 0 dominant, player 1 uniform: only player 1 can gain.
  const std::vector<Policy> mixed{constant_policy(3, 3, 2), Policy::uniform(S, S)};
  const auto m = exploitability_exact(g, mixed, cfg);
  EXPECT_NEAR(m.per_player[0], 0.0, 1e-9);
  EXPECT_NEAR(m.per_player[1], 5.0 / 20.1, 1e-9);
}

TEST(Exploitability, SinglePlayerGreedyOptimumIsZero) {
  AuctionGame game(AuctionParams{}, 1);
  const auto laws = subset_win_laws({}, 0, game.num_actions());
  const auto kernel = game.model().kernel_from_laws(laws);
  const QTable q = value_iteration(kernel, 400);
  const std::vector<Policy> profile{argmax_policy(q, game.model().state_space(), game.model().action_space())};
  EXPECT_NEAR(exploitability_exact(game, profile, ExploitabilityConfig{}).value, 0.0, 1e-6);
}

TEST(Exploitability, PolicyValuesMatchLinearSolve) {
  AuctionGame game(small_params(2, 2), 2);
  Rng rng(4);
  const std::vector<Policy> profile{random_policy(game.model(), rng), random_policy(game.model(), rng)};
  nplayer::kernels::BestResponseTables t;
  nplayer::kernels::build_best_response_serial(game, profile, t);
  const auto v = player_values(game, profile, 0, ExploitabilityConfig{});
  // (I - gamma P_pi) V = R_pi on the joint chain.
  const std::size_t J = t.joint, A = t.actions;
  std::vector<std::vector<double>> M(J, std::vector<double>(J, 0.0));
  std::vector<double> rhs(J, 0.0);
  std::vector<std::size_t> s(2);
  for (std::size_t js = 0; js < J; ++js) {
    game.decode(js, s);
    M[js][js] += 1.0;
    for (std::size_t a = 0; a < A; ++a) {
      const double p = profile[0].at(s[0], a);
      rhs[js] += p * t.R[0][js * A + a];
      for (std::size_t u = 0; u < J; ++u) M[js][u] -= game.discount() * p * t.P[0][(js * A + a) * J + u];
    }
  }
  const auto ref = gmfg::testing::solve_linear(M, rhs);
  for (std::size_t js = 0; js < J; ++js) {
    EXPECT_NEAR(v.policy[js], ref[js], 1e-9);
    EXPECT_GE(v.best[js], v.policy[js] - 1e-12);
  }
}

TEST(ExploitabilityProperty, NonNegativeOnRandomProfiles) {
  Rng rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t N = 1 + static_cast<std::size_t>(rng.uniform_int(3));
    AuctionGame game(small_params(2 + rng.uniform_int(2), 2 + rng.uniform_int(2)), N,
                     rng.bernoulli(0.5) ? ClearingMode::single : ClearingMode::per_player);
    std::vector<Policy> profile;
    for (std::size_t i = 0; i < N; ++i) profile.push_back(random_policy(game.model(), rng));
    const auto res = exploitability_exact(game, profile, ExploitabilityConfig{});
    EXPECT_GE(res.value, 0.0);
    for (double x : res.per_player) EXPECT_GE(x, 0.0);
    EXPECT_GE(res.mean_best_value, res.mean_policy_value - 1e-12);
  }
}

TEST(Exploitability, ParallelBuildIsBitIdentical) {
  AuctionGame game(small_params(3, 3), 3);
  Rng rng(6);
  std::vector<Policy> profile;
  for (int i = 0; i < 3; ++i) profile.push_back(random_policy(game.model(), rng));
  nplayer::kernels::BestResponseTables a, b;
  nplayer::kernels::build_best_response_serial(game, profile, a);
  nplayer::kernels::build_best_response_parallel(game, profile, b);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.P[i], b.P[i]);
    EXPECT_EQ(a.R[i], b.R[i]);
  }
}

TEST(Exploitability, CapacityAndConfig) {
  AuctionGame big(AuctionParams{}, 6);
  std::vector<Policy> profile(6, Policy::uniform(big.model().state_space(), big.model().action_space()));
  EXPECT_THROW(exploitability_exact(big, profile, ExploitabilityConfig{}), CapacityError);
  AuctionGame tiny(small_params(2, 2), 2);
  std::vector<Policy> one(1, Policy::uniform(tiny.model().state_space(), tiny.model().action_space()));
  EXPECT_THROW(exploitability_exact(tiny, one, ExploitabilityConfig{}), UsageError);
  ExploitabilityConfig bad;
  bad.eps0 = 0.0;
  EXPECT_THROW(bad.validate(), UsageError);
  EXPECT_EQ(eval_mode_from_string("sampled"), EvalMode::sampled);
  EXPECT_THROW(eval_mode_from_string("mc"), UsageError);
}

TEST(ExploitabilitySampled, DeterministicWithInterval) {
  AuctionGame game(small_params(4, 5), 8);
  Rng rng(3);
  std::vector<Policy> profile;
  for (int i = 0; i < 8; ++i) profile.push_back(random_policy(game.model(), rng));
  ExploitabilityConfig cfg;
  cfg.mode = EvalMode::sampled;
  cfg.samples = 2000;
  const auto a = exploitability(game, profile, cfg), b = exploitability(game, profile, cfg);
  EXPECT_EQ(a.value, b.value);
  EXPECT_GT(a.ci_half_width, 0.0);
  EXPECT_GE(a.value, 0.0);
  EXPECT_EQ(a.samples, 2000u);
  cfg.seed = 1;
  EXPECT_NE(exploitability(game, profile, cfg).value, a.value);
}

TEST(ExploitabilitySampled, SinglePlayerHasNothingToGain) {
  // Alone, every bid wins at price 0 and leaves the budget alone.
  AuctionGame game(small_params(5, 3), 1);
  Rng rng(13);
  const std::vector<Policy> profile{random_policy(game.model(), rng)};
  ExploitabilityConfig cfg;
  EXPECT_NEAR(exploitability_exact(game, profile, cfg).value, 0.0, 1e-9);
  cfg.mode = EvalMode::sampled;
  cfg.samples = 500;
  EXPECT_NEAR(exploitability_sampled(game, profile, cfg).value, 0.0, 1e-9);
}
