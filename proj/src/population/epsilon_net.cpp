#include "gmfg/epsilon_net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmfg/errors.hpp"
#include "gmfg/serialize.hpp"

namespace gmfg {

std::string to_string(NetMode mode) {
  switch (mode) {
    case NetMode::automatic: return "automatic";
    case NetMode::exact_grid: return "exact-grid";
    case NetMode::quantized: return "quantized";
  }
  return "?";
}

NetMode net_mode_from_string(const std::string& name) {
  if (name == "automatic" || name == "auto") return NetMode::automatic;
  if (name == "exact-grid" || name == "exact") return NetMode::exact_grid;
  if (name == "quantized") return NetMode::quantized;
  throw UsageError("unknown net mode '" + name + "'");
}

double EpsilonNet::composition_count(std::size_t cells, std::int64_t m) {
  // C(m + n - 1, n - 1) through lgamma; exact enough to compare with the cap.
  const double n = static_cast<double>(cells);
  const double mm = static_cast<double>(m);
  const double logc = std::lgamma(mm + n) - std::lgamma(n) - std::lgamma(mm + 1.0);
  return std::exp(logc);
}

EpsilonNet::EpsilonNet(std::size_t states, std::size_t actions, std::int64_t m, double epsilon,
                       NetMode mode)
    : states_(states), actions_(actions), m_(m), epsilon_(epsilon), mode_(mode) {
  if (mode_ != NetMode::exact_grid) return;
  const std::size_t n = cells();
  // Enumerate compositions in lexicographically increasing order.
  std::vector<std::int32_t> cur(n, 0);
  cur[n - 1] = static_cast<std::int32_t>(m_);
  for (;;) {
    points_.insert(points_.end(), cur.begin(), cur.end());
    // Next composition: find rightmost position i < n-1 that can grow while
    // some mass remains to its right.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 2;
    while (i >= 0) {
      std::int64_t right = 0;
      for (std::size_t j = i + 1; j < n; ++j) right += cur[j];
      if (right > 0) break;
      --i;
    }
    if (i < 0) break;
    std::int64_t right = 0;
    for (std::size_t j = i + 1; j < n; ++j) right += cur[j];
    ++cur[i];
    --right;
    for (std::size_t j = i + 1; j < n; ++j) cur[j] = 0;
    cur[n - 1] = static_cast<std::int32_t>(right);
  }
}

EpsilonNet EpsilonNet::build(std::size_t states, std::size_t actions, double epsilon, NetMode mode) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw UsageError("build_net: epsilon must lie in (0,1)");
  const std::size_t n = states * actions;
  const auto m = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) / (2.0 * epsilon) - 1e-12));
  auto net = with_resolution(states, actions, std::max<std::int64_t>(m, 1), mode);
  net.epsilon_ = epsilon;
  return net;
}

EpsilonNet EpsilonNet::with_resolution(std::size_t states, std::size_t actions, std::int64_t m,
                                       NetMode mode) {
  if (states == 0 || actions == 0) throw UsageError("build_net: empty space");
  if (m < 1) throw UsageError("build_net: resolution must be >= 1");
  const std::size_t n = states * actions;
  const double count = composition_count(n, m);
  if (mode == NetMode::automatic) mode = count <= kEnumerationCap ? NetMode::exact_grid : NetMode::quantized;
  if (mode == NetMode::exact_grid && count > kEnumerationCap)
    throw CapacityError("build_net: exact grid would hold ~" + format_real(count) + " points (cap 2e6)");
  const double eps = static_cast<double>(n) / (2.0 * static_cast<double>(m));
  return EpsilonNet(states, actions, m, eps, mode);
}

std::vector<std::int64_t> EpsilonNet::point(std::size_t i) const {
  const std::size_t n = cells();
  return std::vector<std::int64_t>(points_.begin() + i * n, points_.begin() + (i + 1) * n);
}

std::vector<std::int64_t> EpsilonNet::project_quantized(std::span<const double> w) const {
  const std::size_t n = w.size();
  const double m = static_cast<double>(m_);
  std::vector<std::int64_t> counts(n);
  std::vector<double> rem(n);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = w[i] * m;
    const double r = std::nearbyint(x);
    if (std::abs(x - r) < 1e-9) x = r;
    counts[i] = static_cast<std::int64_t>(std::floor(x));
    rem[i] = x - static_cast<double>(counts[i]);
    total += counts[i];
  }
  // Largest remainders take the missing units; ties go to the lower index.
  std::int64_t deficit = m_ - total;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; deficit > 0; k = (k + 1) % n, --deficit) ++counts[order[k]];
  // Overshoot is only possible from rounding noise; take from the smallest remainders.
  for (std::size_t k = n; deficit < 0; ++deficit) {
    k = (k == 0 ? n : k) - 1;
    while (counts[order[k]] == 0) k = (k == 0 ? n : k) - 1;
    --counts[order[k]];
  }
  return counts;
}

std::vector<std::int64_t> EpsilonNet::project_exact(std::span<const double> w) const {
  const std::size_t n = cells();
  const double m = static_cast<double>(m_);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  const std::size_t count = point_count();
  for (std::size_t p = 0; p < count; ++p) {
    const std::int32_t* pt = points_.data() + p * n;
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) l1 += std::abs(static_cast<double>(pt[i]) / m - w[i]);
    // Strict improvement beyond rounding keeps the lexicographically first minimizer.
    if (l1 < best - 1e-12) {
      best = l1;
      best_idx = p;
    }
  }
  return point(best_idx);
}

JointDistribution EpsilonNet::project(const JointDistribution& population) const {
  if (population.num_states() != states_ || population.num_actions() != actions_)
    throw UsageError("project: population shape does not match the net");
  const auto counts = mode_ == NetMode::exact_grid ? project_exact(population.weights())
                                                   : project_quantized(population.weights());
  std::vector<double> w(counts.size());
  const double m = static_cast<double>(m_);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts[i]) / m;
  return JointDistribution(population.state_space(), population.action_space(), std::move(w));
}

std::string EpsilonNet::describe() const {
  return "net mode=" + to_string(mode_) + " m=" + std::to_string(m_) + " epsilon=" + format_real(epsilon_);
}

}  // namespace gmfg
