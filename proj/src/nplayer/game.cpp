#include <algorithm>
#include <cmath>

#include "gmfg/errors.hpp"
#include "gmfg/nplayer.hpp"

namespace gmfg::nplayer {

std::size_t FiniteGame::joint_size() const {
  std::size_t size = 1;
  for (std::size_t i = 0; i < num_players(); ++i) size *= num_states();
  return size;
}

void FiniteGame::decode(std::size_t index, std::span<std::size_t> states) const {
  const std::size_t ns = num_states();
  for (std::size_t i = num_players(); i-- > 0;) {
    states[i] = index % ns;
    index /= ns;
  }
}

std::size_t FiniteGame::encode(std::span<const std::size_t> states) const {
  std::size_t index = 0;
  for (std::size_t s : states) index = index * num_states() + s;
  return index;
}

std::string to_string(ClearingMode mode) { return mode == ClearingMode::per_player ? "per_player" : "single"; }

ClearingMode clearing_mode_from_string(const std::string& name) {
  if (name == "per_player") return ClearingMode::per_player;
  if (name == "single") return ClearingMode::single;
  throw UsageError("unknown clearing mode '" + name + "'");
}

AuctionGame::AuctionGame(AuctionParams params, std::size_t players, ClearingMode mode)
    : model_(std::move(params)), players_(players), mode_(mode) {
  if (players_ < 1) throw UsageError("nplayer: need at least one player");
}

std::size_t AuctionGame::opponents() const {
  const std::size_t M = static_cast<std::size_t>(params().M);
  if (mode_ == ClearingMode::per_player) return std::min(M - 1, players_ - 1);
  return std::min(M, players_) - 1;
}

namespace {

double choose(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

// Post-auction budget law with replenishment folded in.
void land(const AuctionParams& p, int budget, double w, std::span<double> out) {
  const auto row = p.replenish_row(budget);
  for (std::size_t d = 0; d < row.size(); ++d)
    if (row[d] > 0.0) out[budget + d] += w * row[d];
}

// out <- out (x) marginal with the new player as the least significant digit.
void extend_product(std::vector<double>& joint, std::span<const double> marginal) {
  std::vector<double> next(joint.size() * marginal.size());
  for (std::size_t j = 0; j < joint.size(); ++j) {
    if (joint[j] == 0.0) continue;
    for (std::size_t s = 0; s < marginal.size(); ++s) next[j * marginal.size() + s] = joint[j] * marginal[s];
  }
  joint.swap(next);
}

// Uniform draw of k items from `pool` (partial Fisher-Yates, front of pool).
void draw_subset(std::vector<std::size_t>& pool, std::size_t k, Rng& rng) {
  if (k >= pool.size()) return;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size() - i)));
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace

std::vector<WinLaw> subset_win_laws(std::span<const std::vector<double>> alphas, std::size_t m,
                                    std::size_t levels) {
  const std::size_t n = alphas.size(), K = levels;
  if (m > n) throw UsageError("subset_win_law: subset larger than the opponent pool");
  std::vector<WinLaw> laws(K);
  for (auto& law : laws) law.win_at.assign(K, 0.0);
  if (m == 0) {
    for (auto& law : laws) law.win_at[0] = 1.0;
    return laws;
  }
  const double subsets = choose(n, m);
  std::vector<std::vector<double>> cdf(n, std::vector<double>(K));
  for (std::size_t j = 0; j < n; ++j) {
    if (alphas[j].size() != K) throw UsageError("subset_win_law: bid law has the wrong length");
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) cdf[j][k] = (acc += alphas[j][k]);
  }
  // P(max over the subset <= k) = e_m(F_1(k), ..., F_n(k)) / C(n, m).
  std::vector<double> at_most(K);
  std::vector<double> e(m + 1);
  for (std::size_t k = 0; k < K; ++k) {
    std::fill(e.begin(), e.end(), 0.0);
    e[0] = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = std::min(m, j + 1); r >= 1; --r) e[r] += e[r - 1] * cdf[j][k];
    at_most[k] = e[m] / subsets;
  }
  // Top tie at the bid: g[r][t] sums over r-subsets with t members at the bid
  // and the rest strictly below.
  std::vector<std::vector<double>> g(m + 1, std::vector<double>(m + 1));
  for (std::size_t bid = 0; bid < K; ++bid) {
    auto& law = laws[bid];
    for (std::size_t k = 0; k < bid; ++k) law.win_at[k] = at_most[k] - (k > 0 ? at_most[k - 1] : 0.0);
    for (auto& row : g) std::fill(row.begin(), row.end(), 0.0);
    g[0][0] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double below = bid > 0 ? cdf[j][bid - 1] : 0.0;
      const double at = alphas[j][bid];
      for (std::size_t r = std::min(m, j + 1); r >= 1; --r)
        for (std::size_t t = r; t-- > 0;) {
          g[r][t + 1] += g[r - 1][t] * at;
          g[r][t] += g[r - 1][t] * below;
        }
    }
    double tie = 0.0;
    for (std::size_t t = 1; t <= m; ++t) tie += g[m][t] / (1.0 + static_cast<double>(t));
    law.win_at[bid] = tie / subsets;
    law.lose = std::max(0.0, 1.0 - law.win_probability());
  }
  return laws;
}

WinLaw subset_win_law(std::size_t bid, std::span<const std::vector<double>> alphas, std::size_t m,
                      std::size_t levels) {
  if (bid >= levels) throw UsageError("subset_win_law: bid index out of range");
  return subset_win_laws(alphas, m, levels)[bid];
}

void AuctionGame::transition(std::span<const std::size_t> states, std::span<const std::size_t> actions,
                             std::span<double> rewards, std::span<double> next) const {
  const std::size_t N = players_, ns = num_states(), na = num_actions();
  const auto& p = params();
  const double ev = p.mean_value();
  std::fill(rewards.begin(), rewards.end(), 0.0);
  if (mode_ == ClearingMode::per_player) {
    std::vector<double> joint{1.0};
    std::vector<std::vector<double>> others;
    std::vector<double> marginal(ns);
    for (std::size_t i = 0; i < N; ++i) {
      others.clear();
      for (std::size_t j = 0; j < N; ++j) {
        if (j == i) continue;
        others.emplace_back(na, 0.0);
        others.back()[actions[j]] = 1.0;
      }
      const auto law = subset_win_law(actions[i], others, opponents(), na);
      const int budget = static_cast<int>(states[i]);
      std::fill(marginal.begin(), marginal.end(), 0.0);
      land(p, budget, law.lose, marginal);
      for (std::size_t k = 0; k < law.win_at.size(); ++k) {
        if (law.win_at[k] == 0.0) continue;
        const double price = model_.bid_value(k);
        rewards[i] += law.win_at[k] * auction_reward(budget, true, price, ev, p.rho);
        land(p, budget_transition(budget, true, price), law.win_at[k], marginal);
      }
      extend_product(joint, marginal);
    }
    std::copy(joint.begin(), joint.end(), next.begin());
    return;
  }
  // Single clearing: average over the C(N, m) selected sets and the tie coin.
  std::fill(next.begin(), next.end(), 0.0);
  const std::size_t m = std::min(static_cast<std::size_t>(p.M), N);
  const double weight = 1.0 / choose(N, m);
  std::vector<std::size_t> pick(m);
  for (std::size_t i = 0; i < m; ++i) pick[i] = i;
  std::vector<std::vector<double>> rows(N, std::vector<double>(ns));
  auto accumulate = [&](std::size_t winner, double price, double w) {
    std::vector<double> joint{1.0};
    for (std::size_t i = 0; i < N; ++i) {
      std::fill(rows[i].begin(), rows[i].end(), 0.0);
      int budget = static_cast<int>(states[i]);
      if (i == winner) {
        rewards[i] += w * auction_reward(budget, true, price, ev, p.rho);
        budget = budget_transition(budget, true, price);
      }
      land(p, budget, 1.0, rows[i]);
      extend_product(joint, rows[i]);
    }
    for (std::size_t j = 0; j < joint.size(); ++j) next[j] += w * joint[j];
  };
  while (true) {
    double top = -1.0, second = -1.0;
    std::vector<std::size_t> tied;
    for (std::size_t i : pick) {
      const double b = model_.bid_value(actions[i]);
      if (b > top) {
        second = top;
        top = b;
        tied.assign(1, i);
      } else {
        if (b == top) tied.push_back(i);
        second = std::max(second, b);
      }
    }
    const double price = m == 1 ? 0.0 : std::max(second, 0.0);
    for (std::size_t w : tied) accumulate(w, price, weight / static_cast<double>(tied.size()));
    // Next combination in lexicographic order.
    std::size_t i = m;
    while (i > 0 && pick[i - 1] == N - m + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
}

RoundOutcome nplayer_step(const AuctionGame& game, std::span<const std::size_t> states,
                          std::span<const std::size_t> bids, Rng& shared, std::span<Rng> per_player) {
  const std::size_t N = game.num_players();
  if (states.size() != N || bids.size() != N || per_player.size() != N)
    throw UsageError("nplayer_step: need one state, bid and stream per player");
  const auto& p = game.params();
  const auto& model = game.model();
  RoundOutcome out;
  out.next_states.resize(N);
  out.rewards.assign(N, 0.0);
  out.won.assign(N, false);
  out.prices.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    if (states[i] >= game.num_states() || bids[i] >= game.num_actions())
      throw UsageError("nplayer_step: state or bid out of range");
  }
  std::vector<std::size_t> pool;
  std::vector<double> opposing;
  if (game.mode() == ClearingMode::per_player) {
    const std::size_t m = game.opponents();
    out.selected.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
      out.selected[i] = i;
      Rng& r = per_player[i];
      pool.clear();
      for (std::size_t j = 0; j < N; ++j)
        if (j != i) pool.push_back(j);
      draw_subset(pool, m, r);
      opposing.clear();
      for (std::size_t k = 0; k < m; ++k) opposing.push_back(model.bid_value(bids[pool[k]]));
      const auto res = clear_against(model.bid_value(bids[i]), opposing, r);
      out.won[i] = res.won;
      out.prices[i] = res.price;
    }
  } else {
    const std::size_t m = game.opponents() + 1;
    pool.resize(N);
    for (std::size_t j = 0; j < N; ++j) pool[j] = j;
    draw_subset(pool, m, shared);
    out.selected.assign(pool.begin(), pool.begin() + m);
    std::sort(out.selected.begin(), out.selected.end());
    double top = -1.0, second = -1.0;
    std::vector<std::size_t> tied;
    for (std::size_t i : out.selected) {
      const double b = model.bid_value(bids[i]);
      if (b > top) {
        second = top;
        top = b;
        tied.assign(1, i);
      } else {
        if (b == top) tied.push_back(i);
        second = std::max(second, b);
      }
    }
    std::size_t winner = tied.front();
    if (tied.size() > 1) winner = tied[static_cast<std::size_t>(shared.uniform_int(static_cast<int>(tied.size())))];
    const double price = m == 1 ? 0.0 : std::max(second, 0.0);
    for (std::size_t i : out.selected) out.prices[i] = price;
    out.won[winner] = true;
  }
  for (std::size_t i = 0; i < N; ++i) {
    Rng& r = per_player[i];
    const int budget = static_cast<int>(states[i]);
    const double v = p.value_levels[r.categorical(p.value_probs)];
    out.rewards[i] = auction_reward(budget, out.won[i], out.prices[i], v, p.rho);
    out.next_states[i] =
        static_cast<std::size_t>(replenish(budget_transition(budget, out.won[i], out.prices[i]), p, r));
  }
  return out;
}

SinglePlayerSampler::SinglePlayerSampler(const AuctionGame& game) : game_(game) {
  if (game.num_players() != 1) throw UsageError("SinglePlayerSampler: game must have one player");
}

SampledTransition SinglePlayerSampler::sample(std::size_t s, std::size_t a, Rng& rng) const {
  const std::size_t state[1] = {s};
  const std::size_t bid[1] = {a};
  const auto out = nplayer_step(game_, state, bid, rng, std::span<Rng>(&rng, 1));
  return {out.rewards[0], out.next_states[0]};
}

}  // namespace gmfg::nplayer
