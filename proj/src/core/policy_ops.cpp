#include "gmfg/policy_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmfg/errors.hpp"

namespace gmfg {
namespace {

void require_finite(std::span<const double> x) {
  if (x.empty()) throw UsageError("policy operator on empty vector");
  for (double v : x)
    if (!std::isfinite(v)) throw UsageError("policy operator on non-finite input");
}

}  // namespace

std::vector<double> softmax(std::span<const double> x, double c) {
  require_finite(x);
  if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("softmax: temperature must be positive");
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(c * (x[i] - top));
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> argmax_e(std::span<const double> x) {
  require_finite(x);
  const double top = *std::max_element(x.begin(), x.end());
  std::vector<double> out(x.size(), 0.0);
  std::size_t ties = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= top - kTieTolerance) ++ties;
  const double p = 1.0 / static_cast<double>(ties);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= top - kTieTolerance) out[i] = p;
  return out;
}

double action_gap(std::span<const double> x) {
  require_finite(x);
  const double top = *std::max_element(x.begin(), x.end());
  double second = -std::numeric_limits<double>::infinity();
  for (double v : x)
    if (v < top - kTieTolerance) second = std::max(second, v);
  if (second == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  return top - second;
}

Distribution softmax(SpacePtr actions, std::span<const double> x, double c) {
  return Distribution(std::move(actions), softmax(x, c));
}

Distribution argmax_e(SpacePtr actions, std::span<const double> x) {
  return Distribution(std::move(actions), argmax_e(x));
}

Policy softmax_policy(const QTable& q, double c, SpacePtr states, SpacePtr actions) {
  std::vector<double> probs;
  probs.reserve(q.values().size());
  for (std::size_t s = 0; s < q.num_states(); ++s) {
    const auto row = softmax(q.row(s), c);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Policy(std::move(states), std::move(actions), std::move(probs));
}

Policy argmax_policy(const QTable& q, SpacePtr states, SpacePtr actions) {
  std::vector<double> probs;
  probs.reserve(q.values().size());
  for (std::size_t s = 0; s < q.num_states(); ++s) {
    const auto row = argmax_e(q.row(s));
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return Policy(std::move(states), std::move(actions), std::move(probs));
}

}  // namespace gmfg
