#pragma once

#include "gmfg/distribution.hpp"

namespace gmfg {

// d_TV = 1/2 sum |p_i - q_i|.
double tv_distance(const Distribution& p, const Distribution& q);
// Exact W1 with Euclidean ground cost on the embeddings.
double w1_distance(const Distribution& p, const Distribution& q);

// Joint versions use the concatenated (state, action) embedding.
double w1_joint(const JointDistribution& a, const JointDistribution& b);
double tv_joint(const JointDistribution& a, const JointDistribution& b);
double l1_joint(const JointDistribution& a, const JointDistribution& b);
double linf_joint(const JointDistribution& a, const JointDistribution& b);

// D(pi, pi') = max_s W1(pi(s), pi'(s)).
double policy_distance(const Policy& a, const Policy& b);

}  // namespace gmfg
