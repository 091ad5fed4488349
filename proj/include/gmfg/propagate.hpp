#pragma once

#include <span>

#include "gmfg/distribution.hpp"
#include "gmfg/model.hpp"
#include "gmfg/rng.hpp"

namespace gmfg {

namespace kernels {

// next_mu(s') = sum_{s,a} mu(s) pi(s,a) P(s'|s,a). Both variants add terms
// in the same (s, a) order for every s', so results are bit-identical.
void propagate_serial(const MdpKernel& kernel, std::span<const double> policy,
                      std::span<const double> mu, std::span<double> next_mu);
void propagate_parallel(const MdpKernel& kernel, std::span<const double> policy,
                        std::span<const double> mu, std::span<double> next_mu);

}  // namespace kernels

// Exact one-step population update L' = Gamma_2(pi, L):
//   mu'(s') = sum_{s,a} mu(s) P(s'|s,a,L) pi(s,a),   L'(s',a') = mu'(s') pi(s',a').
JointDistribution propagate(const GmfgModel& model, const Policy& policy,
                            const JointDistribution& population);
// Same, with the kernel already frozen at `population`.
JointDistribution propagate(const MdpKernel& kernel, const Policy& policy,
                            const JointDistribution& population);

struct SimulatorStep {
  std::size_t action;
  std::size_t next_state;
  double reward;
  JointDistribution next_population;
};

// Population simulator G(s, pi, L): samples the representative's action,
// reward and next state; the population part is the exact propagation.
SimulatorStep simulator_step(const GmfgModel& model, std::size_t state, const Policy& policy,
                             const JointDistribution& population, Rng& rng);

}  // namespace gmfg
