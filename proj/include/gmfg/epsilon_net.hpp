#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmfg/distribution.hpp"

namespace gmfg {

enum class NetMode { automatic, exact_grid, quantized };

std::string to_string(NetMode mode);
NetMode net_mode_from_string(const std::string& name);

// Uniform grid on the joint simplex: points whose weights are integer
// multiples of 1/m. Exact-grid mode enumerates every composition of m into
// |S||A| parts (capped); quantized mode projects by largest-remainder
// rounding without enumeration. Both reach d_TV <= n / (2m) <= epsilon.
class EpsilonNet {
 public:
  static constexpr double kEnumerationCap = 2e6;

  // m = ceil(|S||A| / (2 epsilon)); automatic picks exact-grid when the
  // composition count is within the cap.
  static EpsilonNet build(std::size_t states, std::size_t actions, double epsilon,
                          NetMode mode = NetMode::automatic);
  static EpsilonNet with_resolution(std::size_t states, std::size_t actions, std::int64_t m,
                                    NetMode mode = NetMode::automatic);

  // C(m + n - 1, n - 1) as a double (may be astronomically large).
  static double composition_count(std::size_t cells, std::int64_t m);

  JointDistribution project(const JointDistribution& population) const;

  NetMode mode() const noexcept { return mode_; }
  std::int64_t resolution() const noexcept { return m_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t cells() const noexcept { return states_ * actions_; }
  std::size_t point_count() const noexcept { return points_.size() / std::max<std::size_t>(cells(), 1); }
  // Grid point i as integer counts (exact-grid mode only).
  std::vector<std::int64_t> point(std::size_t i) const;

  std::string describe() const;

 private:
  EpsilonNet(std::size_t states, std::size_t actions, std::int64_t m, double epsilon, NetMode mode);

  std::vector<std::int64_t> project_quantized(std::span<const double> w) const;
  std::vector<std::int64_t> project_exact(std::span<const double> w) const;

  std::size_t states_;
  std::size_t actions_;
  std::int64_t m_;
  double epsilon_;
  NetMode mode_;
  std::vector<std::int32_t> points_;
};

}  // namespace gmfg
