#pragma once

#include <functional>
#include <vector>

#include "gmfg/distribution.hpp"
#include "gmfg/model.hpp"
#include "gmfg/rng.hpp"

namespace gmfg {

// Population -> policy map (an inner solver followed by softmax, say).
using PolicyMap = std::function<Policy(const JointDistribution&)>;
using PopulationMap = std::function<JointDistribution(const JointDistribution&)>;

// Dirichlet(1,...,1) draw on the joint simplex.
JointDistribution random_joint(const SpacePtr& states, const SpacePtr& actions, Rng& rng);

struct ProbeRow {
  double w1_input = 0.0;      // W1(L, L')
  double d1 = 0.0;            // D(Gamma1 L, Gamma1 L') / W1(L, L')
  double d2 = 0.0;            // W1(Gamma2(pi, L), Gamma2(pi', L)) / D(pi, pi'); 0 if pi == pi'
  double d3 = 0.0;            // W1(Gamma2(pi, L), Gamma2(pi, L')) / W1(L, L')
  double full = 0.0;          // W1(Gamma L, Gamma L') / W1(L, L')
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  std::size_t skipped = 0;
  double max_d1 = 0.0;
  double max_d2 = 0.0;
  double max_d3 = 0.0;
  double max_full = 0.0;
  // max_d1 * max_d2 + max_d3, the empirical stand-in for d1 d2 + d3.
  double composite = 0.0;
  // Max full ratio < 1; diagnostic only.
  bool contraction_observed = false;
};

ProbeReport contraction_probe(const GmfgModel& model, const PolicyMap& gamma1,
                              std::size_t sample_count, Rng& rng);

// Ratio table for an arbitrary population map; only `full` is filled.
ProbeReport probe_map(const SpacePtr& states, const SpacePtr& actions, const PopulationMap& map,
                      std::size_t sample_count, Rng& rng);

}  // namespace gmfg
