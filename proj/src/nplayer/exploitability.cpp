#include "gmfg/exploitability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gmfg/errors.hpp"
#include "gmfg/solvers.hpp"

namespace gmfg::nplayer {

std::string to_string(EvalMode mode) { return mode == EvalMode::exact ? "exact" : "sampled"; }

EvalMode eval_mode_from_string(const std::string& name) {
  if (name == "exact") return EvalMode::exact;
  if (name == "sampled") return EvalMode::sampled;
  throw UsageError("unknown exploitability mode '" + name + "'");
}

void ExploitabilityConfig::validate() const {
  if (!(eps0 > 0.0)) throw UsageError("exploitability: eps0 must be > 0");
  if (!(vi_tol > 0.0)) throw UsageError("exploitability: vi_tol must be > 0");
  if (max_sweeps < 1) throw UsageError("exploitability: max_sweeps must be >= 1");
  if (mode == EvalMode::sampled && samples < 2) throw UsageError("exploitability: need >= 2 samples");
}

namespace {

void check_profile(const FiniteGame& game, std::span<const Policy> profile) {
  if (profile.size() != game.num_players()) throw UsageError("exploitability: need one policy per player");
  for (const auto& p : profile)
    if (p.num_states() != game.num_states() || p.num_actions() != game.num_actions())
      throw UsageError("exploitability: policy shape does not match the game");
}

void check_capacity(const FiniteGame& game) {
  const double N = static_cast<double>(game.num_players());
  const double J = std::pow(static_cast<double>(game.num_states()), N);
  if (J > static_cast<double>(kExactJointCap))
    throw CapacityError("exploitability: |S|^N = " + std::to_string(static_cast<long long>(J)) +
                        " exceeds the exact cap " + std::to_string(kExactJointCap) + "; use mode=sampled");
  const double cells = N * J * J * static_cast<double>(game.num_actions());
  if (cells > kExactTableCap)
    throw CapacityError("exploitability: exact tables need " + std::to_string(static_cast<long long>(cells)) +
                        " entries (cap " + std::to_string(static_cast<long long>(kExactTableCap)) +
                        "); use mode=sampled");
}

void prepare(const FiniteGame& game, kernels::BestResponseTables& out) {
  const std::size_t N = game.num_players(), J = game.joint_size(), A = game.num_actions();
  out.players = N;
  out.joint = J;
  out.actions = A;
  out.P.assign(N, std::vector<double>(J * A * J, 0.0));
  out.R.assign(N, std::vector<double>(J * A, 0.0));
}

// Fills the rows of joint state `js` for every player.
void build_rows(const FiniteGame& game, std::span<const Policy> profile, std::size_t js,
                kernels::BestResponseTables& out) {
  const std::size_t N = game.num_players(), J = out.joint, A = out.actions;
  std::vector<std::size_t> s(N), a(N, 0);
  game.decode(js, s);
  std::vector<double> rewards(N), next(J), w(N);
  std::size_t combos = 1;
  for (std::size_t i = 0; i < N; ++i) combos *= A;
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t x = c;
    for (std::size_t i = N; i-- > 0;) {
      a[i] = x % A;
      x /= A;
    }
    bool any = false;
    for (std::size_t i = 0; i < N; ++i) {
      double p = 1.0;
      for (std::size_t j = 0; j < N && p > 0.0; ++j)
        if (j != i) p *= profile[j].at(s[j], a[j]);
      w[i] = p;
      any = any || p > 0.0;
    }
    if (!any) continue;
    game.transition(s, a, rewards, next);
    for (std::size_t i = 0; i < N; ++i) {
      if (w[i] == 0.0) continue;
      const std::size_t row = js * A + a[i];
      out.R[i][row] += w[i] * rewards[i];
      double* dst = out.P[i].data() + row * J;
      for (std::size_t t = 0; t < J; ++t) dst[t] += w[i] * next[t];
    }
  }
}

}  // namespace

namespace kernels {

void build_best_response_serial(const FiniteGame& game, std::span<const Policy> profile,
                                BestResponseTables& out) {
  check_profile(game, profile);
  prepare(game, out);
  for (std::size_t js = 0; js < out.joint; ++js) build_rows(game, profile, js, out);
}

void build_best_response_parallel(const FiniteGame& game, std::span<const Policy> profile,
                                  BestResponseTables& out) {
  check_profile(game, profile);
  prepare(game, out);
  const std::ptrdiff_t J = static_cast<std::ptrdiff_t>(out.joint);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t js = 0; js < J; ++js) build_rows(game, profile, static_cast<std::size_t>(js), out);
}

}  // namespace kernels

namespace {

PlayerValues solve_player(const kernels::BestResponseTables& t, const Policy& own, std::size_t i, double gamma,
                          const ExploitabilityConfig& cfg, std::span<const std::size_t> own_state) {
  const std::size_t J = t.joint, A = t.actions;
  const auto& P = t.P[i];
  const auto& R = t.R[i];
  auto q_at = [&](const std::vector<double>& V, std::size_t js, std::size_t a) {
    const double* row = P.data() + (js * A + a) * J;
    double acc = 0.0;
    for (std::size_t u = 0; u < J; ++u) acc += row[u] * V[u];
    return R[js * A + a] + gamma * acc;
  };
  auto iterate = [&](bool best) {
    std::vector<double> V(J, 0.0), W(J);
    for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
      double diff = 0.0;
      for (std::size_t js = 0; js < J; ++js) {
        double v = best ? -std::numeric_limits<double>::infinity() : 0.0;
        for (std::size_t a = 0; a < A; ++a) {
          if (best) {
            v = std::max(v, q_at(V, js, a));
          } else {
            const double p = own.at(own_state[js], a);
            if (p > 0.0) v += p * q_at(V, js, a);
          }
        }
        W[js] = v;
        diff = std::max(diff, std::abs(v - V[js]));
      }
      V.swap(W);
      if (diff <= cfg.vi_tol) return V;
    }
    throw ModelError("exploitability: value iteration did not reach tolerance");
  };
  return {iterate(true), iterate(false)};
}

std::vector<std::size_t> own_states(const FiniteGame& game, std::size_t player) {
  std::vector<std::size_t> out(game.joint_size()), s(game.num_players());
  for (std::size_t js = 0; js < out.size(); ++js) {
    game.decode(js, s);
    out[js] = s[player];
  }
  return out;
}

}  // namespace

PlayerValues player_values(const FiniteGame& game, std::span<const Policy> profile, std::size_t player,
                           const ExploitabilityConfig& cfg) {
  cfg.validate();
  check_capacity(game);
  if (player >= game.num_players()) throw UsageError("exploitability: player out of range");
  kernels::BestResponseTables t;
  kernels::build_best_response_parallel(game, profile, t);
  return solve_player(t, profile[player], player, game.discount(), cfg, own_states(game, player));
}

ExploitabilityResult exploitability_exact(const FiniteGame& game, std::span<const Policy> profile,
                                          const ExploitabilityConfig& cfg) {
  cfg.validate();
  check_capacity(game);
  kernels::BestResponseTables t;
  kernels::build_best_response_parallel(game, profile, t);
  ExploitabilityResult res;
  res.mode = EvalMode::exact;
  const std::size_t N = game.num_players(), J = t.joint;
  res.samples = N * J;
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto v = solve_player(t, profile[i], i, game.discount(), cfg, own_states(game, i));
    double sum = 0.0;
    for (std::size_t js = 0; js < J; ++js) {
      res.mean_best_value += v.best[js];
      res.mean_policy_value += v.policy[js];
    }
    for (std::size_t js = 0; js < J; ++js)
      sum += std::max(0.0, v.best[js] - v.policy[js]) / (std::abs(v.best[js]) + cfg.eps0);
    res.per_player.push_back(sum / static_cast<double>(J));
    total += sum;
  }
  res.value = total / static_cast<double>(N * J);
  res.mean_best_value /= static_cast<double>(N * J);
  res.mean_policy_value /= static_cast<double>(N * J);
  return res;
}

namespace {

// Bid law of one player given a state law.
std::vector<double> bid_law(const Policy& pi, std::span<const double> state_law) {
  std::vector<double> b(pi.num_actions(), 0.0);
  for (std::size_t s = 0; s < state_law.size(); ++s) {
    if (state_law[s] == 0.0) continue;
    for (std::size_t a = 0; a < b.size(); ++a) b[a] += state_law[s] * pi.at(s, a);
  }
  return b;
}

class Surrogate {
 public:
  Surrogate(const AuctionGame& game, std::span<const Policy> profile) : game_(game), profile_(profile) {
    const std::size_t N = game.num_players(), ns = game.num_states();
    const std::size_t M = static_cast<std::size_t>(game.params().M);
    selected_ = game.mode() == ClearingMode::per_player ? 1.0
                                                        : static_cast<double>(std::min(M, N)) / static_cast<double>(N);
    // Decoupled fixed point of the players' state laws.
    laws_.assign(N, std::vector<double>(ns, 1.0 / static_cast<double>(ns)));
    for (int it = 0; it < 2000; ++it) {
      std::vector<std::vector<double>> bids(N);
      for (std::size_t k = 0; k < N; ++k) bids[k] = bid_law(profile_[k], laws_[k]);
      double diff = 0.0;
      std::vector<std::vector<double>> next(N);
      for (std::size_t k = 0; k < N; ++k) {
        const auto chain = state_chain(k, kernel_of(k, bids));
        next[k].assign(ns, 0.0);
        for (std::size_t s = 0; s < ns; ++s)
          for (std::size_t u = 0; u < ns; ++u) next[k][u] += laws_[k][s] * chain[s * ns + u];
        for (std::size_t u = 0; u < ns; ++u) diff = std::max(diff, std::abs(next[k][u] - laws_[k][u]));
      }
      laws_.swap(next);
      if (diff < 1e-13) break;
    }
    stationary_bids_.resize(N);
    for (std::size_t k = 0; k < N; ++k) stationary_bids_[k] = bid_law(profile_[k], laws_[k]);
    for (std::size_t k = 0; k < N; ++k) {
      kernels_.push_back(kernel_of(k, stationary_bids_));
      chains_.push_back(state_chain(k, kernels_.back()));
    }
  }

  // Player k's single-agent kernel when the others bid from `bids`.
  MdpKernel kernel_of(std::size_t k, const std::vector<std::vector<double>>& bids) const {
    std::vector<std::vector<double>> others;
    for (std::size_t j = 0; j < bids.size(); ++j)
      if (j != k) others.push_back(bids[j]);
    auto laws = subset_win_laws(others, game_.opponents(), game_.num_actions());
    if (selected_ < 1.0) {
      for (auto& law : laws) {
        for (double& w : law.win_at) w *= selected_;
        law.lose = std::max(0.0, 1.0 - law.win_probability());
      }
    }
    return game_.model().kernel_from_laws(laws);
  }

  // State-to-state chain of player k under its own policy.
  std::vector<double> state_chain(std::size_t k, const MdpKernel& kernel) const {
    const std::size_t ns = kernel.num_states, na = kernel.num_actions;
    std::vector<double> c(ns * ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t a = 0; a < na; ++a) {
        const double p = profile_[k].at(s, a);
        if (p == 0.0) continue;
        const auto row = kernel.next(s, a);
        for (std::size_t u = 0; u < ns; ++u) c[s * ns + u] += p * row[u];
      }
    return c;
  }

  const AuctionGame& game_;
  std::span<const Policy> profile_;
  double selected_ = 1.0;
  std::vector<std::vector<double>> laws_;
  std::vector<std::vector<double>> stationary_bids_;
  std::vector<MdpKernel> kernels_;
  std::vector<std::vector<double>> chains_;
};

std::vector<double> evaluate(const MdpKernel& k, const Policy* pi, const ExploitabilityConfig& cfg) {
  const std::size_t ns = k.num_states, na = k.num_actions;
  std::vector<double> V(ns, 0.0), Q(ns * na), W(ns);
  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    gmfg::kernels::bellman_sweep_serial(k, V, Q);
    double diff = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      double v = 0.0;
      if (pi) {
        for (std::size_t a = 0; a < na; ++a) v += pi->at(s, a) * Q[s * na + a];
      } else {
        v = *std::max_element(Q.begin() + s * na, Q.begin() + (s + 1) * na);
      }
      W[s] = v;
      diff = std::max(diff, std::abs(v - V[s]));
    }
    V.swap(W);
    if (diff <= cfg.vi_tol) return V;
  }
  throw ModelError("exploitability: value iteration did not reach tolerance");
}

}  // namespace

ExploitabilityResult exploitability_sampled(const AuctionGame& game, std::span<const Policy> profile,
                                            const ExploitabilityConfig& cfg) {
  cfg.validate();
  check_profile(game, profile);
  const std::size_t N = game.num_players(), ns = game.num_states(), na = game.num_actions();
  const std::size_t H = cfg.horizon;
  const double gamma = game.discount();
  const Surrogate env(game, profile);

  // Terminal values: the stationary environment.
  std::vector<std::vector<double>> tail_best(N), tail_policy(N);
  for (std::size_t i = 0; i < N; ++i) {
    tail_best[i] = evaluate(env.kernels_[i], nullptr, cfg);
    tail_policy[i] = evaluate(env.kernels_[i], &profile[i], cfg);
  }
  // bids[j][x][t]: player j's bid law t steps after starting at budget x.
  std::vector<std::vector<std::vector<std::vector<double>>>> bids(
      N, std::vector<std::vector<std::vector<double>>>(ns, std::vector<std::vector<double>>(H)));
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t x = 0; x < ns; ++x) {
      std::vector<double> m(ns, 0.0), next(ns);
      m[x] = 1.0;
      for (std::size_t t = 0; t < H; ++t) {
        bids[j][x][t] = bid_law(profile[j], m);
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < ns; ++s)
          if (m[s] != 0.0)
            for (std::size_t u = 0; u < ns; ++u) next[u] += m[s] * env.chains_[j][s * ns + u];
        m.swap(next);
      }
    }

  const Rng root = Rng(cfg.seed).split(Stream::evaluation);
  std::vector<double> gaps(cfg.samples);
  std::vector<std::size_t> who(cfg.samples);
  std::vector<double> best_at(cfg.samples), policy_at(cfg.samples);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(cfg.samples);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    Rng r = root.split(static_cast<std::uint64_t>(k));
    const std::size_t i = static_cast<std::size_t>(r.uniform_int(static_cast<int>(N)));
    std::vector<std::size_t> s(N);
    for (auto& x : s) x = static_cast<std::size_t>(r.uniform_int(static_cast<int>(ns)));
    std::vector<double> best = tail_best[i], pol = tail_policy[i], nb(ns), np(ns);
    std::vector<std::vector<double>> now(N);
    for (std::size_t t = H; t-- > 0;) {
      for (std::size_t j = 0; j < N; ++j) now[j] = j == i ? std::vector<double>(na, 0.0) : bids[j][s[j]][t];
      const MdpKernel kt = env.kernel_of(i, now);
      for (std::size_t x = 0; x < ns; ++x) {
        double vb = -std::numeric_limits<double>::infinity(), vp = 0.0;
        for (std::size_t a = 0; a < na; ++a) {
          const auto row = kt.next(x, a);
          double eb = 0.0, ep = 0.0;
          for (std::size_t u = 0; u < ns; ++u) {
            eb += row[u] * best[u];
            ep += row[u] * pol[u];
          }
          const double rew = kt.expected_reward(x, a);
          vb = std::max(vb, rew + gamma * eb);
          vp += profile[i].at(x, a) * (rew + gamma * ep);
        }
        nb[x] = vb;
        np[x] = vp;
      }
      best.swap(nb);
      pol.swap(np);
    }
    const double v = best[s[i]];
    gaps[k] = std::max(0.0, v - pol[s[i]]) / (std::abs(v) + cfg.eps0);
    best_at[k] = v;
    policy_at[k] = pol[s[i]];
    who[k] = i;
  }

  ExploitabilityResult res;
  res.mode = EvalMode::sampled;
  res.samples = cfg.samples;
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double g : gaps) ss += (g - mean) * (g - mean);
  res.value = mean;
  res.ci_half_width = 1.96 * std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  std::vector<double> sum(N, 0.0), cnt(N, 0.0);
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    sum[who[k]] += gaps[k];
    cnt[who[k]] += 1.0;
  }
  for (std::size_t i = 0; i < N; ++i) res.per_player.push_back(cnt[i] > 0 ? sum[i] / cnt[i] : 0.0);
  res.mean_best_value = std::accumulate(best_at.begin(), best_at.end(), 0.0) / static_cast<double>(n);
  res.mean_policy_value = std::accumulate(policy_at.begin(), policy_at.end(), 0.0) / static_cast<double>(n);
  return res;
}

ExploitabilityResult exploitability(const AuctionGame& game, std::span<const Policy> profile,
                                    const ExploitabilityConfig& cfg) {
  return cfg.mode == EvalMode::exact ? exploitability_exact(game, profile, cfg)
                                     : exploitability_sampled(game, profile, cfg);
}

}  // namespace gmfg::nplayer
