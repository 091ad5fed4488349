#include "gmfg/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gmfg/errors.hpp"

namespace gmfg::transport {
namespace {

constexpr double kMassEps = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double w1_line(std::span<const double> positions, std::span<const double> p,
               std::span<const double> q) {
  const std::size_t n = positions.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
  double fp = 0.0, fq = 0.0, total = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    fp += p[order[k]];
    fq += q[order[k]];
    total += std::abs(fp - fq) * (positions[order[k + 1]] - positions[order[k]]);
  }
  return total;
}

double min_cost_flow(std::span<const double> supply, std::span<const double> demand,
                     const std::function<double(std::size_t, std::size_t)>& cost) {
  const std::size_t ns = supply.size();
  const std::size_t nd = demand.size();
  if (ns == 0 || nd == 0) return 0.0;

  std::vector<double> c(ns * nd);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nd; ++j) c[i * nd + j] = cost(i, j);

  std::vector<double> excess(supply.begin(), supply.end());
  std::vector<double> deficit(demand.begin(), demand.end());
  std::vector<double> flow(ns * nd, 0.0);
  // Nodes 0..ns-1 are sources, ns..ns+nd-1 sinks.
  const std::size_t nv = ns + nd;
  std::vector<double> potential(nv, 0.0);
  std::vector<double> dist(nv);
  std::vector<std::ptrdiff_t> parent(nv);
  std::vector<char> done(nv);

  auto remaining = [&] {
    double r = 0.0;
    for (double e : excess) r += e;
    return r;
  };

  const std::size_t max_rounds = 64 * nv * nv + 64;
  for (std::size_t round = 0; remaining() > 1e-13; ++round) {
    if (round > max_rounds) throw ModelError("min_cost_flow: no convergence");

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < ns; ++i)
      if (excess[i] > kMassEps) dist[i] = 0.0;

    std::ptrdiff_t target = -1;
    for (;;) {
      std::ptrdiff_t u = -1;
      for (std::size_t v = 0; v < nv; ++v)
        if (!done[v] && dist[v] < kInf && (u < 0 || dist[v] < dist[u])) u = static_cast<std::ptrdiff_t>(v);
      if (u < 0) break;
      done[u] = 1;
      if (static_cast<std::size_t>(u) >= ns && deficit[u - ns] > kMassEps) {
        target = u;
        break;
      }
      if (static_cast<std::size_t>(u) < ns) {
        const std::size_t i = u;
        for (std::size_t j = 0; j < nd; ++j) {
          const std::size_t v = ns + j;
          if (done[v]) continue;
          const double nd_ = dist[u] + c[i * nd + j] + potential[i] - potential[v];
          if (nd_ < dist[v]) {
            dist[v] = nd_;
            parent[v] = u;
          }
        }
      } else {
        const std::size_t j = u - ns;
        for (std::size_t i = 0; i < ns; ++i) {
          if (done[i] || flow[i * nd + j] <= kMassEps) continue;
          const double nd_ = dist[u] - c[i * nd + j] + potential[u] - potential[i];
          if (nd_ < dist[i]) {
            dist[i] = nd_;
            parent[i] = u;
          }
        }
      }
    }
    if (target < 0) {
      // Only rounding-level residue can be left without a reachable sink.
      if (remaining() < 1e-9) break;
      throw ModelError("min_cost_flow: unbalanced supply and demand");
    }

    const double dt = dist[target];
    for (std::size_t v = 0; v < nv; ++v) potential[v] += std::min(dist[v], dt);

    // Bottleneck along the path back to a source with excess.
    double push = deficit[target - ns];
    std::ptrdiff_t v = target;
    while (parent[v] >= 0) {
      const std::ptrdiff_t u = parent[v];
      if (static_cast<std::size_t>(u) >= ns) {
        // Backward edge: sink u -> source v cancels flow (v, u).
        push = std::min(push, flow[v * nd + (u - ns)]);
      }
      v = u;
    }
    push = std::min(push, excess[v]);

    v = target;
    while (parent[v] >= 0) {
      const std::ptrdiff_t u = parent[v];
      if (static_cast<std::size_t>(u) < ns) {
        flow[u * nd + (v - ns)] += push;
      } else {
        double& f = flow[v * nd + (u - ns)];
        f -= push;
        if (f < kMassEps) f = 0.0;
      }
      v = u;
    }
    excess[v] -= push;
    if (excess[v] < kMassEps) excess[v] = 0.0;
    deficit[target - ns] -= push;
    if (deficit[target - ns] < kMassEps) deficit[target - ns] = 0.0;
  }

  double total = 0.0;
  for (std::size_t k = 0; k < flow.size(); ++k) total += flow[k] * c[k];
  return total;
}

double w1_metric(std::span<const double> p, std::span<const double> q,
                 const std::function<double(std::size_t, std::size_t)>& distance) {
  std::vector<std::size_t> src, dst;
  std::vector<double> supply, demand;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    if (d > kMassEps) {
      src.push_back(i);
      supply.push_back(d);
    } else if (d < -kMassEps) {
      dst.push_back(i);
      demand.push_back(-d);
    }
  }
  if (src.empty() || dst.empty()) return 0.0;
  // Residual masses agree only up to rounding; rebalance onto the larger side.
  const double ts = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double td = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (ts > td) {
    for (double& x : supply) x *= td / ts;
  } else {
    for (double& x : demand) x *= ts / td;
  }
  return min_cost_flow(supply, demand,
                       [&](std::size_t i, std::size_t j) { return distance(src[i], dst[j]); });
}

}  // namespace gmfg::transport
