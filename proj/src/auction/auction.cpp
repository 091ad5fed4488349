#include "gmfg/auction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmfg/distribution.hpp"
#include "gmfg/errors.hpp"

namespace gmfg {

std::vector<std::vector<double>> coin_replenishment(int s_max) {
  std::vector<std::vector<double>> r(s_max + 1);
  for (int s = 0; s < s_max; ++s) r[s] = {0.5, 0.5};
  r[s_max] = {1.0};
  return r;
}

std::vector<std::vector<double>> zero_replenishment(int s_max) {
  return std::vector<std::vector<double>>(s_max + 1, std::vector<double>{1.0});
}

std::vector<int> AuctionParams::bids() const {
  if (!bid_levels.empty()) return bid_levels;
  std::vector<int> b(s_max + 1);
  std::iota(b.begin(), b.end(), 0);
  return b;
}

std::vector<double> AuctionParams::replenish_row(int s) const {
  if (replenish.empty()) return s < s_max ? std::vector<double>{0.5, 0.5} : std::vector<double>{1.0};
  return replenish.at(s);
}

double AuctionParams::mean_value() const {
  double m = 0.0;
  for (std::size_t i = 0; i < value_levels.size(); ++i) m += value_levels[i] * value_probs[i];
  return m;
}

void AuctionParams::validate() const {
  if (s_max < 1) throw UsageError("auction: s_max must be >= 1");
  if (!(rho >= 0.0)) throw UsageError("auction: rho must be >= 0");
  if (M < 2) throw UsageError("auction: M must be >= 2");
  if (!(discount > 0.0 && discount < 1.0)) throw UsageError("auction: discount must lie in (0,1)");
  if (value_levels.empty() || value_levels.size() != value_probs.size())
    throw UsageError("auction: value levels and probabilities differ in length");
  std::vector<double> vp = value_probs;
  normalize_weights(vp);
  if (!replenish.empty()) {
    if (replenish.size() != num_states()) throw UsageError("auction: replenish needs s_max+1 rows");
    for (int s = 0; s <= s_max; ++s) {
      std::vector<double> row = replenish[s];
      normalize_weights(row);
      for (std::size_t d = 0; d < row.size(); ++d)
        if (row[d] > 0.0 && s + static_cast<int>(d) > s_max)
          throw UsageError("auction: replenishment can exceed s_max at level " + std::to_string(s));
    }
  }
  const auto b = bids();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] < 0) throw UsageError("auction: negative bid level");
    if (i > 0 && b[i] <= b[i - 1]) throw UsageError("auction: bid levels must increase strictly");
  }
}

ClearingResult clear_against(double bid, std::span<const double> opposing, Rng& rng) {
  if (opposing.empty()) return {true, 0.0};
  double top = -1.0;
  double second = -1.0;
  int tied = 0;
  for (double b : opposing) {
    if (b > top) {
      second = top;
      top = b;
      tied = 1;
    } else {
      if (b == top) ++tied;
      second = std::max(second, b);
    }
  }
  bool won = bid > top;
  if (bid == top) won = rng.uniform() * (1.0 + tied) < 1.0;
  if (won) return {true, top};
  // Loser's view: second-largest among all submitted bids.
  return {false, std::max(second, std::min(bid, top))};
}

ClearingResult clear_auction(double bid, std::span<const double> bid_levels,
                             std::span<const double> alpha, int opponents, Rng& rng) {
  std::vector<double> opposing(opponents);
  for (double& b : opposing) b = bid_levels[rng.categorical(alpha)];
  return clear_against(bid, opposing, rng);
}

double auction_reward(int s, bool won, double price, double v, double rho) {
  if (!won) return 0.0;
  const double over = price > s ? price - s : 0.0;
  return (v - price) - (1.0 + rho) * over;
}

int budget_transition(int s, bool won, double price) {
  if (!won) return s;
  if (price <= s) return s - static_cast<int>(price);
  return 0;
}

int replenish(int s_next, const AuctionParams& params, Rng& rng) {
  const auto row = params.replenish_row(s_next);
  return s_next + static_cast<int>(rng.categorical(row));
}

double WinLaw::win_probability() const {
  return std::accumulate(win_at.begin(), win_at.end(), 0.0);
}

WinLaw win_law(std::size_t bid, std::span<const double> alpha, int opponents) {
  const std::size_t K = alpha.size();
  if (bid >= K) throw UsageError("win_law: bid index out of range");
  WinLaw law;
  law.win_at.assign(K, 0.0);
  if (opponents <= 0) {
    law.win_at[0] = 1.0;
    return law;
  }
  const double n = opponents;
  // Strictly below the bid: the max opposing bid sets the price.
  double below = 0.0;
  double prev_pow = 0.0;
  for (std::size_t k = 0; k < bid; ++k) {
    below += alpha[k];
    const double pw = std::pow(below, n);
    law.win_at[k] = pw - prev_pow;
    prev_pow = pw;
  }
  // t >= 1 opponents tie at the top, the rest below: C(n,t) a^t F^{n-t} / (1+t).
  const double a = alpha[bid];
  double tie = 0.0;
  double binom = 1.0;
  for (int t = 1; t <= opponents; ++t) {
    binom = binom * (opponents - t + 1) / t;
    tie += binom * std::pow(a, t) * std::pow(below, opponents - t) / (1.0 + t);
  }
  law.win_at[bid] = tie;
  law.lose = std::max(0.0, 1.0 - law.win_probability());
  return law;
}

namespace {

class AuctionSampler final : public TransitionSampler {
 public:
  AuctionSampler(const AuctionModel& model, std::vector<double> alpha)
      : model_(model), alpha_(std::move(alpha)) {}

  SampledTransition sample(std::size_t s, std::size_t a, Rng& rng) const override {
    const auto& p = model_.params();
    const int budget = static_cast<int>(s);
    const auto res = clear_auction(model_.bid_value(a), model_.bid_values(), alpha_, p.M - 1, rng);
    const double v = p.value_levels[rng.categorical(p.value_probs)];
    const double r = auction_reward(budget, res.won, res.price, v, p.rho);
    const int next = replenish(budget_transition(budget, res.won, res.price), p, rng);
    return {r, static_cast<std::size_t>(next)};
  }

 private:
  const AuctionModel& model_;
  std::vector<double> alpha_;
};

}  // namespace

AuctionModel::AuctionModel(AuctionParams params) : params_(std::move(params)) {
  params_.validate();
  states_ = EmbeddedSpace::integer_line(params_.s_max + 1);
  const auto b = params_.bids();
  actions_ = EmbeddedSpace::from_levels(b);
  bid_values_.assign(b.begin(), b.end());
}

double AuctionModel::reward_spread() const {
  const auto [vmin, vmax] = std::minmax_element(params_.value_levels.begin(), params_.value_levels.end());
  const double top_bid = bid_values_.back();
  const double hi = std::max(0.0, *vmax);
  const double lo = std::min(0.0, *vmin - (2.0 + params_.rho) * top_bid);
  return hi - lo;
}

MdpKernel AuctionModel::kernel_for_alpha(std::span<const double> alpha, int opponents) const {
  std::vector<WinLaw> laws;
  laws.reserve(bid_values_.size());
  for (std::size_t a = 0; a < bid_values_.size(); ++a) laws.push_back(win_law(a, alpha, opponents));
  return kernel_from_laws(laws);
}

MdpKernel AuctionModel::kernel_from_laws(std::span<const WinLaw> laws) const {
  if (laws.size() != bid_values_.size()) throw UsageError("auction: need one win law per bid level");
  const std::size_t ns = params_.num_states();
  const std::size_t na = bid_values_.size();
  MdpKernel k(ns, na, params_.discount);
  const double ev = params_.mean_value();
  std::vector<std::vector<double>> refill(ns);
  for (std::size_t s = 0; s < ns; ++s) refill[s] = params_.replenish_row(static_cast<int>(s));
  auto land = [&](std::span<double> row, int s_next, double w) {
    const auto& r = refill[s_next];
    for (std::size_t d = 0; d < r.size(); ++d)
      if (r[d] > 0.0) row[s_next + d] += w * r[d];
  };
  for (std::size_t a = 0; a < na; ++a) {
    const auto& law = laws[a];
    for (std::size_t s = 0; s < ns; ++s) {
      const int budget = static_cast<int>(s);
      auto row = k.next(s, a);
      double reward = 0.0;
      land(row, budget, law.lose);
      for (std::size_t j = 0; j < na; ++j) {
        const double w = law.win_at[j];
        if (w == 0.0) continue;
        const double price = bid_values_[j];
        reward += w * auction_reward(budget, true, price, ev, params_.rho);
        land(row, budget_transition(budget, true, price), w);
      }
      k.reward[s * na + a] = reward;
    }
  }
  return k;
}

MdpKernel AuctionModel::kernel(const JointDistribution& population) const {
  if (population.num_states() != params_.num_states() || population.num_actions() != bid_values_.size())
    throw UsageError("auction: population shape does not match the model");
  const auto alpha = population.action_marginal_weights();
  return kernel_for_alpha(alpha, params_.M - 1);
}

std::unique_ptr<TransitionSampler> AuctionModel::sampler(const JointDistribution& population) const {
  if (population.num_actions() != bid_values_.size())
    throw UsageError("auction: population shape does not match the model");
  return std::make_unique<AuctionSampler>(*this, population.action_marginal_weights());
}

std::shared_ptr<AuctionModel> exact_kernel(const AuctionParams& params) {
  return std::make_shared<AuctionModel>(params);
}

}  // namespace gmfg
