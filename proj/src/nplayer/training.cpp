#include <algorithm>
#include <cmath>
#include <string>

#include "gmfg/errors.hpp"
#include "gmfg/nplayer.hpp"
#include "gmfg/policy_ops.hpp"

namespace gmfg::nplayer {

namespace {

struct Streams {
  Rng shared;
  std::vector<Rng> behavior;
  std::vector<Rng> env;
};

Streams make_streams(std::size_t N, bool symmetric, const Rng& rng) {
  Streams st{rng.split(Stream::environment), {}, {}};
  for (std::size_t i = 0; i < N; ++i) {
    const Rng player = rng.split(Stream::players, symmetric ? 0 : i);
    st.behavior.push_back(player.split(Stream::behavior));
    st.env.push_back(player.split(Stream::environment));
  }
  return st;
}

std::vector<std::size_t> initial_states(const AuctionGame& game, const TrainConfig& cfg, const Rng& rng) {
  const std::size_t N = game.num_players();
  if (!cfg.initial_states.empty()) {
    if (cfg.initial_states.size() != N) throw UsageError("train: need one initial state per player");
    for (std::size_t s : cfg.initial_states)
      if (s >= game.num_states()) throw UsageError("train: initial state out of range");
    return cfg.initial_states;
  }
  Rng init = rng.split(Stream::init);
  std::vector<std::size_t> s(N);
  for (auto& x : s) x = static_cast<std::size_t>(init.uniform_int(static_cast<int>(game.num_states())));
  return s;
}

void check_reward(double r, std::size_t t, std::size_t player) {
  if (!std::isfinite(r))
    throw ModelError("train: non-finite reward for player " + std::to_string(player) + " at round " +
                     std::to_string(t));
}

void validate(const TrainConfig& cfg) {
  if (cfg.rounds < 1) throw UsageError("train: rounds must be >= 1");
  cfg.inner.validate();
}

}  // namespace

IlResult il_train(const AuctionGame& game, const TrainConfig& cfg, Rng& rng) {
  validate(cfg);
  const std::size_t N = game.num_players(), ns = game.num_states(), na = game.num_actions();
  const double gamma = game.discount();
  Streams st = make_streams(N, cfg.symmetric_streams, rng);
  auto s = initial_states(game, cfg, rng);
  IlResult res;
  res.tables.assign(N, QTable(ns, na, cfg.inner.q_init));
  std::vector<std::size_t> a(N);
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    const double eps = cfg.inner.explore.at(t, cfg.rounds);
    for (std::size_t i = 0; i < N; ++i) a[i] = epsilon_greedy(res.tables[i].row(s[i]), eps, st.behavior[i]);
    const auto out = nplayer_step(game, s, a, st.shared, st.env);
    for (std::size_t i = 0; i < N; ++i) {
      check_reward(out.rewards[i], t, i);
      auto& q = res.tables[i];
      q.blend(s[i], a[i], out.rewards[i] + gamma * q.row_max(out.next_states[i]), cfg.inner.h);
    }
    s = out.next_states;
  }
  const auto& model = game.model();
  for (const auto& q : res.tables)
    res.policies.push_back(argmax_policy(q, model.state_space(), model.action_space()));
  return res;
}

std::size_t mean_action_bin(double mean_bid, double max_bid, std::size_t bins) {
  if (bins <= 1 || !(max_bid > 0.0)) return 0;
  const double x = std::floor(mean_bid / max_bid * static_cast<double>(bins));
  if (x <= 0.0) return 0;
  return std::min(bins - 1, static_cast<std::size_t>(x));
}

MfqResult mfq_train(const AuctionGame& game, const MfqConfig& cfg, Rng& rng) {
  validate(cfg.train);
  if (cfg.bins < 1) throw UsageError("mfq: bins must be >= 1");
  if (!(cfg.c > 0.0)) throw UsageError("mfq: c must be > 0");
  const std::size_t N = game.num_players(), ns = game.num_states(), na = game.num_actions();
  const double gamma = game.discount();
  const auto& model = game.model();
  const double max_bid = model.bid_values().back();
  Streams st = make_streams(N, cfg.train.symmetric_streams, rng);
  auto s = initial_states(game, cfg.train, rng);

  MfqResult res;
  res.tables.resize(N);
  for (auto& tab : res.tables) {
    tab.by_bin.assign(cfg.bins, QTable(ns, na, cfg.train.inner.q_init));
    tab.bin_counts.assign(cfg.bins, 0);
  }
  // Bins are conditioned on the previous round's opposing bids.
  std::vector<std::size_t> prev(N);
  Rng first = rng.split(Stream::init, 1);
  for (auto& b : prev) b = static_cast<std::size_t>(first.uniform_int(static_cast<int>(na)));
  auto bins_of = [&](const std::vector<std::size_t>& bids) {
    double total = 0.0;
    for (std::size_t b : bids) total += model.bid_value(b);
    std::vector<std::size_t> out(N, 0);
    if (N == 1) return out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = mean_action_bin((total - model.bid_value(bids[i])) / static_cast<double>(N - 1), max_bid, cfg.bins);
    return out;
  };

  std::vector<std::size_t> bin = bins_of(prev);
  std::vector<std::size_t> a(N);
  for (std::size_t t = 0; t < cfg.train.rounds; ++t) {
    const double eps = cfg.train.inner.explore.at(t, cfg.train.rounds);
    for (std::size_t i = 0; i < N; ++i) {
      const auto row = res.tables[i].by_bin[bin[i]].row(s[i]);
      Rng& b = st.behavior[i];
      if (cfg.selection == MfqSelection::epsilon_greedy) {
        a[i] = epsilon_greedy(row, eps, b);
      } else if (b.uniform() < eps) {
        a[i] = static_cast<std::size_t>(b.uniform_int(static_cast<int>(na)));
      } else {
        const auto w = softmax(row, cfg.c);
        a[i] = b.categorical(w);
      }
    }
    const auto out = nplayer_step(game, s, a, st.shared, st.env);
    const auto next_bin = bins_of(a);
    for (std::size_t i = 0; i < N; ++i) {
      check_reward(out.rewards[i], t, i);
      auto& tab = res.tables[i];
      const double target = out.rewards[i] + gamma * tab.by_bin[next_bin[i]].row_max(out.next_states[i]);
      tab.by_bin[bin[i]].blend(s[i], a[i], target, cfg.train.inner.h);
      ++tab.bin_counts[bin[i]];
    }
    s = out.next_states;
    bin = next_bin;
  }

  for (const auto& tab : res.tables) {
    double total = 0.0;
    for (auto n : tab.bin_counts) total += static_cast<double>(n);
    std::vector<double> probs(ns * na, 0.0);
    for (std::size_t b = 0; b < cfg.bins; ++b) {
      const double f = static_cast<double>(tab.bin_counts[b]) / total;
      if (f == 0.0) continue;
      for (std::size_t x = 0; x < ns; ++x) {
        const auto w = softmax(tab.by_bin[b].row(x), cfg.c);
        for (std::size_t y = 0; y < na; ++y) probs[x * na + y] += f * w[y];
      }
    }
    res.policies.emplace_back(model.state_space(), model.action_space(), std::move(probs));
  }
  return res;
}

}  // namespace gmfg::nplayer
