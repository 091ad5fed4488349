#include "gmfg/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "gmfg/errors.hpp"
#include "gmfg/transport.hpp"

namespace gmfg {
namespace {

void require_same(const Distribution& p, const Distribution& q) {
  if (!same_space(p.space(), q.space())) throw UsageError("distributions live on different spaces");
}

void require_same(const JointDistribution& a, const JointDistribution& b) {
  if (!a.same_spaces(b)) throw UsageError("joint distributions live on different spaces");
}

double w1_on_space(const EmbeddedSpace& space, std::span<const double> p,
                   std::span<const double> q) {
  if (space.dim() == 1) {
    std::vector<double> pos(space.size());
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = space.coordinate(i);
    return transport::w1_line(pos, p, q);
  }
  return transport::w1_metric(p, q, [&](std::size_t i, std::size_t j) { return space.distance(i, j); });
}

}  // namespace

double tv_distance(const Distribution& p, const Distribution& q) {
  require_same(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

double w1_distance(const Distribution& p, const Distribution& q) {
  require_same(p, q);
  return w1_on_space(*p.space(), p.weights(), q.weights());
}

double w1_joint(const JointDistribution& a, const JointDistribution& b) {
  require_same(a, b);
  const EmbeddedSpace& S = *a.state_space();
  const EmbeddedSpace& A = *a.action_space();
  const std::size_t na = A.size();
  return transport::w1_metric(a.weights(), b.weights(), [&](std::size_t i, std::size_t j) {
    const double ds = S.distance(i / na, j / na);
    const double da = A.distance(i % na, j % na);
    return std::sqrt(ds * ds + da * da);
  });
}

double tv_joint(const JointDistribution& a, const JointDistribution& b) {
  return 0.5 * l1_joint(a, b);
}

double l1_joint(const JointDistribution& a, const JointDistribution& b) {
  require_same(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.weights().size(); ++i) acc += std::abs(a.weights()[i] - b.weights()[i]);
  return acc;
}

double linf_joint(const JointDistribution& a, const JointDistribution& b) {
  require_same(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.weights().size(); ++i)
    m = std::max(m, std::abs(a.weights()[i] - b.weights()[i]));
  return m;
}

double policy_distance(const Policy& a, const Policy& b) {
  if (!same_space(a.state_space(), b.state_space()) || !same_space(a.action_space(), b.action_space()))
    throw UsageError("policies live on different spaces");
  double worst = 0.0;
  for (std::size_t s = 0; s < a.num_states(); ++s)
    worst = std::max(worst, w1_on_space(*a.action_space(), a.row(s), b.row(s)));
  return worst;
}

}  // namespace gmfg
