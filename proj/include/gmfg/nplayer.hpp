#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmfg/auction.hpp"
#include "gmfg/distribution.hpp"
#include "gmfg/rng.hpp"
#include "gmfg/solvers.hpp"

namespace gmfg::nplayer {

// Finite game with identical per-player state/action sets; joint states are
// mixed-radix indices with player 0 most significant.
class FiniteGame {
 public:
  virtual ~FiniteGame() = default;
  virtual std::size_t num_players() const = 0;
  virtual std::size_t num_states() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual double discount() const = 0;
  // Expected rewards per player and the law of the next joint state
  // (dense, |S|^N entries) for a joint state and joint action.
  virtual void transition(std::span<const std::size_t> states, std::span<const std::size_t> actions,
                          std::span<double> rewards, std::span<double> next) const = 0;

  std::size_t joint_size() const;
  void decode(std::size_t index, std::span<std::size_t> states) const;
  std::size_t encode(std::span<const std::size_t> states) const;
};

// per_player: every player clears its own auction against M-1 opponents
// drawn without replacement from the other N-1 (all of them if fewer).
// single: one clearing among M players drawn from all N; the rest idle.
enum class ClearingMode { per_player, single };
std::string to_string(ClearingMode mode);
ClearingMode clearing_mode_from_string(const std::string& name);

struct RoundOutcome {
  std::vector<std::size_t> next_states;
  std::vector<double> rewards;
  std::vector<bool> won;
  std::vector<double> prices;
  // Players that took part in the clearing (single mode); everyone otherwise.
  std::vector<std::size_t> selected;
};

class AuctionGame final : public FiniteGame {
 public:
  AuctionGame(AuctionParams params, std::size_t players, ClearingMode mode = ClearingMode::per_player);

  std::size_t num_players() const override { return players_; }
  std::size_t num_states() const override { return model_.num_states(); }
  std::size_t num_actions() const override { return model_.num_actions(); }
  double discount() const override { return model_.discount(); }
  void transition(std::span<const std::size_t> states, std::span<const std::size_t> actions,
                  std::span<double> rewards, std::span<double> next) const override;

  const AuctionModel& model() const noexcept { return model_; }
  const AuctionParams& params() const noexcept { return model_.params(); }
  ClearingMode mode() const noexcept { return mode_; }
  // Opponents each player faces in one clearing.
  std::size_t opponents() const;

 private:
  AuctionModel model_;
  std::size_t players_;
  ClearingMode mode_;
};

// One round. `shared` drives the single-mode selection and winner coin;
// `per_player[i]` drives player i's opponent draw, tie coin, value and
// replenishment.
RoundOutcome nplayer_step(const AuctionGame& game, std::span<const std::size_t> states,
                          std::span<const std::size_t> bids, Rng& shared, std::span<Rng> per_player);

// Law of (won, price) for a bid at level `bid` against a uniformly drawn
// m-subset of independent opponents with bid laws `alphas` over `levels`
// bid levels; the _laws form returns one law per bid level.
WinLaw subset_win_law(std::size_t bid, std::span<const std::vector<double>> alphas, std::size_t m,
                      std::size_t levels);
std::vector<WinLaw> subset_win_laws(std::span<const std::vector<double>> alphas, std::size_t m,
                                    std::size_t levels);

// Presents a one-player game to single-agent learners.
class SinglePlayerSampler final : public TransitionSampler {
 public:
  explicit SinglePlayerSampler(const AuctionGame& game);
  SampledTransition sample(std::size_t s, std::size_t a, Rng& rng) const override;

 private:
  const AuctionGame& game_;
};

struct TrainConfig {
  std::size_t rounds = 40000;
  InnerConfig inner;  // h, exploration and q_init are read from here
  // All players share stream index 0 (for symmetry checks).
  bool symmetric_streams = false;
  // Initial budgets; drawn uniformly when empty.
  std::vector<std::size_t> initial_states;
};

struct IlResult {
  std::vector<QTable> tables;
  std::vector<Policy> policies;
};

// Independent learners on own (budget, bid); final policies are argmax_e.
IlResult il_train(const AuctionGame& game, const TrainConfig& cfg, Rng& rng);

enum class MfqSelection { boltzmann, epsilon_greedy };

struct MfqConfig {
  TrainConfig train;
  std::size_t bins = 10;
  double c = 4.0;
  MfqSelection selection = MfqSelection::boltzmann;
};

// Q^i(s, a, bin(mean opposing bid)) as one table per bin; bin_counts[b]
// counts the rounds in which b was the conditioning bin.
struct MeanActionQTable {
  std::vector<QTable> by_bin;
  std::vector<std::uint64_t> bin_counts;
};

struct MfqResult {
  std::vector<MeanActionQTable> tables;
  // State-only policies: softmax rows mixed by empirical bin frequencies.
  std::vector<Policy> policies;
};

std::size_t mean_action_bin(double mean_bid, double max_bid, std::size_t bins);

MfqResult mfq_train(const AuctionGame& game, const MfqConfig& cfg, Rng& rng);

}  // namespace gmfg::nplayer
