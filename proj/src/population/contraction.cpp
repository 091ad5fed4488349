#include "gmfg/contraction.hpp"

#include <algorithm>

#include "gmfg/errors.hpp"
#include "gmfg/metrics.hpp"
#include "gmfg/propagate.hpp"

namespace gmfg {

JointDistribution random_joint(const SpacePtr& states, const SpacePtr& actions, Rng& rng) {
  std::vector<double> w(states->size() * actions->size());
  double total = 0.0;
  for (double& x : w) total += (x = rng.exponential());
  for (double& x : w) x /= total;
  return JointDistribution(states, actions, std::move(w));
}

namespace {

constexpr double kDegenerate = 1e-12;

void finish(ProbeReport& report) {
  for (const auto& r : report.rows) {
    report.max_d1 = std::max(report.max_d1, r.d1);
    report.max_d2 = std::max(report.max_d2, r.d2);
    report.max_d3 = std::max(report.max_d3, r.d3);
    report.max_full = std::max(report.max_full, r.full);
  }
  report.composite = report.max_d1 * report.max_d2 + report.max_d3;
  report.contraction_observed = !report.rows.empty() && report.max_full < 1.0;
}

}  // namespace

ProbeReport contraction_probe(const GmfgModel& model, const PolicyMap& gamma1,
                              std::size_t sample_count, Rng& rng) {
  if (sample_count < 2) throw UsageError("contraction_probe: sample_count must be >= 2");
  const auto& S = model.state_space();
  const auto& A = model.action_space();
  ProbeReport report;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const auto L = random_joint(S, A, rng);
    const auto Lp = random_joint(S, A, rng);
    const double w = w1_joint(L, Lp);
    if (w <= kDegenerate) {
      ++report.skipped;
      continue;
    }
    const Policy pi = gamma1(L);
    const Policy pip = gamma1(Lp);
    const auto kernel_L = model.kernel(L);
    const auto kernel_Lp = model.kernel(Lp);

    ProbeRow row;
    row.w1_input = w;
    const double dpi = policy_distance(pi, pip);
    row.d1 = dpi / w;
    const auto next_pi_L = propagate(kernel_L, pi, L);
    if (dpi > kDegenerate) row.d2 = w1_joint(next_pi_L, propagate(kernel_L, pip, L)) / dpi;
    row.d3 = w1_joint(next_pi_L, propagate(kernel_Lp, pi, Lp)) / w;
    row.full = w1_joint(next_pi_L, propagate(kernel_Lp, pip, Lp)) / w;
    report.rows.push_back(row);
  }
  finish(report);
  return report;
}

ProbeReport probe_map(const SpacePtr& states, const SpacePtr& actions, const PopulationMap& map,
                      std::size_t sample_count, Rng& rng) {
  if (sample_count < 2) throw UsageError("probe_map: sample_count must be >= 2");
  ProbeReport report;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const auto L = random_joint(states, actions, rng);
    const auto Lp = random_joint(states, actions, rng);
    const double w = w1_joint(L, Lp);
    if (w <= kDegenerate) {
      ++report.skipped;
      continue;
    }
    ProbeRow row;
    row.w1_input = w;
    row.full = w1_joint(map(L), map(Lp)) / w;
    report.rows.push_back(row);
  }
  finish(report);
  return report;
}

}  // namespace gmfg
