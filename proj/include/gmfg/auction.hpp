#pragma once

#include <memory>
#include <span>
#include <vector>

#include "gmfg/model.hpp"
#include "gmfg/rng.hpp"

namespace gmfg {

// Repeated Vickrey auction with a budget: state = budget level 0..s_max,
// action = bid level. Units are budget units throughout.
struct AuctionParams {
  int s_max = 9;
  double rho = 0.2;
  int M = 5;
  double discount = 0.8;
  std::vector<double> value_levels{1.0, 2.0, 3.0, 4.0};
  std::vector<double> value_probs{0.25, 0.25, 0.25, 0.25};
  // replenish[s][d] = P(Delta = d | post-auction budget s); empty means the
  // default: +1 with probability 1/2 below s_max, nothing at s_max.
  std::vector<std::vector<double>> replenish;
  // Empty means {0, ..., s_max}.
  std::vector<int> bid_levels;

  std::size_t num_states() const { return static_cast<std::size_t>(s_max) + 1; }
  std::vector<int> bids() const;
  std::vector<double> replenish_row(int s) const;
  double mean_value() const;
  // Throws UsageError on inconsistent fields.
  void validate() const;
};

// Default fulfillment rule; `zero` gives Delta = 0 everywhere.
std::vector<std::vector<double>> coin_replenishment(int s_max);
std::vector<std::vector<double>> zero_replenishment(int s_max);

struct ClearingResult {
  bool won = false;
  // Second-largest of all M submitted bids; equals the highest opposing bid
  // when the representative wins.
  double price = 0.0;
};

// One clearing against `opponents` i.i.d. draws from `alpha` over the bid
// levels. A tie at the top is won with probability 1 / (1 + #tied opponents).
ClearingResult clear_auction(double bid, std::span<const double> bid_levels,
                             std::span<const double> alpha, int opponents, Rng& rng);
// Same, against explicit opposing bids.
ClearingResult clear_against(double bid, std::span<const double> opposing, Rng& rng);

double auction_reward(int s, bool won, double price, double v, double rho);
int budget_transition(int s, bool won, double price);
int replenish(int s_next, const AuctionParams& params, Rng& rng);

// Law of (won, price) for a bid at level index `bid` against n i.i.d.
// opponents from alpha: win_at[k] = P(win and price = level k); lose
// collects the rest. Uses P(max <= k) = F(k)^n and a binomial sum for ties.
struct WinLaw {
  std::vector<double> win_at;
  double lose = 0.0;
  double win_probability() const;
};
WinLaw win_law(std::size_t bid, std::span<const double> alpha, int opponents);

class AuctionModel final : public GmfgModel {
 public:
  explicit AuctionModel(AuctionParams params);

  const SpacePtr& state_space() const override { return states_; }
  const SpacePtr& action_space() const override { return actions_; }
  double discount() const override { return params_.discount; }
  // max(0, v_max) - min(0, v_min - (2 + rho) b_max): win at price 0 versus
  // win at the top price from an empty budget.
  double reward_spread() const override;

  MdpKernel kernel(const JointDistribution& population) const override;
  // Simulation: opponents, value and replenishment are drawn per call; the
  // reward is the realized one.
  std::unique_ptr<TransitionSampler> sampler(const JointDistribution& population) const override;

  const AuctionParams& params() const noexcept { return params_; }
  double bid_value(std::size_t a) const { return bid_values_[a]; }
  std::span<const double> bid_values() const noexcept { return bid_values_; }

  // Kernel against an explicit bid law alpha; shared by the N-player code.
  MdpKernel kernel_for_alpha(std::span<const double> alpha, int opponents) const;
  // Kernel from one win law per bid level.
  MdpKernel kernel_from_laws(std::span<const WinLaw> laws) const;

 private:
  AuctionParams params_;
  SpacePtr states_;
  SpacePtr actions_;
  std::vector<double> bid_values_;
};

std::shared_ptr<AuctionModel> exact_kernel(const AuctionParams& params);

}  // namespace gmfg
