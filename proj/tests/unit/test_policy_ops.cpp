#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gmfg/policy_ops.hpp"
#include "gmfg/rng.hpp"

using namespace gmfg;

namespace {

double l2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double tv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

std::vector<double> random_vec(std::size_t n, Rng& rng, double scale = 3.0) {
  std::vector<double> x(n);
  for (double& v : x) v = scale * (2.0 * rng.uniform() - 1.0);
  return x;
}

}  // namespace

TEST(Softmax, Examples) {
  const auto u = softmax(std::vector<double>{0, 0, 0, 0}, 7.0);
  for (double p : u) EXPECT_DOUBLE_EQ(p, 0.25);
  const auto s = softmax(std::vector<double>{1.0, 0.0}, 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(s[0], e / (1.0 + e), 1e-15);
  EXPECT_NEAR(s[1], 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(s[0], 0.7311, 5e-5);
  const auto sharp = softmax(std::vector<double>{1.0, 1.0 - 1e-3}, 1e6);
  EXPECT_GT(sharp[0], 1.0 - 1e-12);
}

TEST(Softmax, ShiftInvariantAndOverflowSafe) {
  const std::vector<double> x{1000.0, 999.0, 998.0};
  const auto a = softmax(x, 4.0);
  const auto b = softmax(std::vector<double>{2.0, 1.0, 0.0}, 4.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(std::isfinite(a[i]));
    EXPECT_NEAR(a[i], b[i], 1e-15);
  }
}

TEST(ArgmaxE, Examples) {
  EXPECT_EQ(argmax_e(std::vector<double>{1, 1}), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(argmax_e(std::vector<double>{1, 1 - 1e-6}), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(argmax_e(std::vector<double>{3, 1, 3}), (std::vector<double>{0.5, 0.0, 0.5}));
  // Inside the tie tolerance.
  EXPECT_EQ(argmax_e(std::vector<double>{1, 1 - 1e-12}), (std::vector<double>{0.5, 0.5}));
}

TEST(ActionGap, Examples) {
  EXPECT_DOUBLE_EQ(action_gap(std::vector<double>{5, 3, 1}), 2.0);
  EXPECT_EQ(action_gap(std::vector<double>{2, 2, 2}), std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(action_gap(std::vector<double>{1, 1, 0}), 1.0);
}

TEST(SoftmaxProperty, Lipschitz) {
  Rng rng(31);
  for (double c : {1.0, 4.0, 16.0}) {
    for (int t = 0; t < 500; ++t) {
      const std::size_t n = 2 + rng.uniform_int(8);
      const auto x = random_vec(n, rng), y = random_vec(n, rng);
      EXPECT_LE(l2(softmax(x, c), softmax(y, c)), c * l2(x, y) + 1e-12);
    }
  }
}

TEST(SoftmaxProperty, CloseToArgmax) {
  Rng rng(32);
  for (double c : {1.0, 4.0, 16.0}) {
    for (int t = 0; t < 500; ++t) {
      const std::size_t n = 2 + rng.uniform_int(8);
      auto x = random_vec(n, rng);
      if (t % 4 == 0) x[1] = x[0];  // tied maxima stay finite-gap when n > 2
      const double gap = action_gap(x);
      if (!std::isfinite(gap)) continue;
      const double bound = 2.0 * n * std::exp(-c * gap);
      EXPECT_LE(l2(softmax(x, c), argmax_e(x)), bound + 1e-12);
    }
  }
}

TEST(SoftmaxProperty, ConvergesToArgmaxWhenTemperatureDoubles) {
  Rng rng(33);
  for (int t = 0; t < 200; ++t) {
    const auto x = random_vec(2 + rng.uniform_int(6), rng);
    const auto target = argmax_e(x);
    double prev = std::numeric_limits<double>::infinity();
    for (double c = 1.0; c <= 1024.0; c *= 2.0) {
      const double d = tv(softmax(x, c), target);
      EXPECT_LE(d, prev + 1e-15);
      prev = d;
    }
    EXPECT_LT(prev, 1e-3 + 2.0 * x.size() * std::exp(-1024.0 * action_gap(x)));
  }
}

TEST(Policies, FromQTable) {
  auto S = EmbeddedSpace::integer_line(2), A = EmbeddedSpace::integer_line(2);
  QTable q(2, 2);
  q.at(0, 0) = 1.0;
  q.at(1, 1) = 2.0;
  q.at(1, 0) = 2.0;
  const auto pa = argmax_policy(q, S, A);
  EXPECT_DOUBLE_EQ(pa.at(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(pa.at(1, 0), 0.5);
  const auto ps = softmax_policy(q, 4.0, S, A);
  for (double p : ps.probabilities()) EXPECT_GT(p, 0.0);
  EXPECT_NEAR(ps.at(0, 0), std::exp(4.0) / (1.0 + std::exp(4.0)), 1e-15);
}
