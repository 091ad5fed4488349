#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gmfg::transport {

// 1-D W1 via the CDF identity: sum_k |F_p(x_k) - F_q(x_k)| (x_{k+1} - x_k).
// Positions need not be sorted.
double w1_line(std::span<const double> positions, std::span<const double> p,
               std::span<const double> q);

// Exact balanced transportation cost between `supply` (rows) and `demand`
// (columns), cost(i, j) >= 0. Successive shortest paths with Johnson
// potentials on the dense bipartite residual graph. Both vectors must carry
// the same total mass.
double min_cost_flow(std::span<const double> supply, std::span<const double> demand,
                     const std::function<double(std::size_t, std::size_t)>& cost);

// Exact W1 between two weight vectors on one metric point set. Shared mass
// stays in place (zero cost under a metric), the residual is solved by
// min_cost_flow.
double w1_metric(std::span<const double> p, std::span<const double> q,
                 const std::function<double(std::size_t, std::size_t)>& distance);

}  // namespace gmfg::transport
