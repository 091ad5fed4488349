#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmfg/distribution.hpp"
#include "gmfg/nplayer.hpp"

namespace gmfg::nplayer {

// exact: best responses on the joint-state MDP. sampled: decoupled
// surrogate for large N; opponents' states evolve as independent chains in
// the stationary environment of the profile, and the gap is averaged over
// uniformly drawn (player, joint state) pairs.
enum class EvalMode { exact, sampled };
std::string to_string(EvalMode mode);
EvalMode eval_mode_from_string(const std::string& name);

inline constexpr std::size_t kExactJointCap = 100000;
// Dense best-response tables are N |S|^N |A| |S|^N doubles.
inline constexpr double kExactTableCap = 5e7;

struct ExploitabilityConfig {
  EvalMode mode = EvalMode::exact;
  double eps0 = 0.1;
  double vi_tol = 1e-12;
  std::size_t max_sweeps = 100000;
  std::size_t samples = 10000;
  std::size_t horizon = 40;
  std::uint64_t seed = 0;
  void validate() const;
};

// C = mean over players and joint states of
// (V*_i(s) - V_i(s; profile)) / (|V*_i(s)| + eps0).
struct ExploitabilityResult {
  EvalMode mode = EvalMode::exact;
  double value = 0.0;
  // 95% normal half-width; 0 for the exact mode.
  double ci_half_width = 0.0;
  std::size_t samples = 0;
  std::vector<double> per_player;
  // Averages of V*_i and V_i(.; profile) over the same (player, state) pairs.
  double mean_best_value = 0.0;
  double mean_policy_value = 0.0;
};

ExploitabilityResult exploitability_exact(const FiniteGame& game, std::span<const Policy> profile,
                                          const ExploitabilityConfig& cfg);
ExploitabilityResult exploitability_sampled(const AuctionGame& game, std::span<const Policy> profile,
                                            const ExploitabilityConfig& cfg);
// Dispatches on cfg.mode.
ExploitabilityResult exploitability(const AuctionGame& game, std::span<const Policy> profile,
                                    const ExploitabilityConfig& cfg);

// Player i's values on the joint MDP with the other players fixed.
struct PlayerValues {
  std::vector<double> best;    // V*_i
  std::vector<double> policy;  // V_i(.; profile)
};
PlayerValues player_values(const FiniteGame& game, std::span<const Policy> profile, std::size_t player,
                           const ExploitabilityConfig& cfg);

namespace kernels {

// P[i][((s * A) + a) * J + s'] and R[i][s * A + a]: player i's joint MDP
// with the others' actions averaged out under the profile.
struct BestResponseTables {
  std::size_t players = 0, joint = 0, actions = 0;
  std::vector<std::vector<double>> P;
  std::vector<std::vector<double>> R;
};

// The parallel build splits over joint states; each row is written by one
// thread in the serial order, so both return identical tables.
void build_best_response_serial(const FiniteGame& game, std::span<const Policy> profile,
                                BestResponseTables& out);
void build_best_response_parallel(const FiniteGame& game, std::span<const Policy> profile,
                                  BestResponseTables& out);

}  // namespace kernels

}  // namespace gmfg::nplayer
