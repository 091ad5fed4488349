#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gmfg/auction.hpp"
#include "gmfg/model.hpp"
#include "gmfg/solvers.hpp"

namespace gmfg::exp {

// Sectioned key=value text:
//
//   # comment
//   [model]
//   s_max = 9
//
// Keys are addressed as "section.key". Every key has a schema default;
// unknown keys and malformed values raise ConfigError.
class Config {
 public:
  static Config defaults();
  // Applies `text` on top of `base`.
  static Config parse(std::string_view text, const Config& base = defaults());

  void set(const std::string& key, const std::string& value);
  // "section.key=value"
  void apply_override(const std::string& assignment);
  bool has(const std::string& key) const;

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<long long> integers(const std::string& key) const;
  std::vector<std::string> words(const std::string& key) const;
  // Comma list; "a..b" expands to the inclusive range.
  std::vector<std::uint64_t> seeds(const std::string& key = "evaluation.seeds") const;

  // Canonical form (schema order, every key) and its FNV-1a 64 hash.
  std::string canonical() const;
  std::uint64_t hash() const;

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);

struct Preset {
  std::string name;
  std::string description;
  // Applied on top of Config::defaults().
  std::vector<std::pair<std::string, std::string>> overrides;
};

const std::vector<Preset>& presets();
// Throws ConfigError for an unknown name.
Config preset_config(const std::string& name);

// Builders from a config.
AuctionParams auction_params(const Config& cfg);
std::shared_ptr<GmfgModel> make_model(const Config& cfg, std::uint64_t seed);
InnerConfig inner_config(const Config& cfg);
OuterConfig outer_config(const Config& cfg, const GmfgModel& model, std::uint64_t seed);

struct RunOptions {
  std::vector<std::string> overrides;  // "section.key=value"
  std::vector<std::uint64_t> seeds;    // empty: evaluation.seeds
  std::filesystem::path out;           // empty: output.dir, then runs/<preset>
};

struct RunReport {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;
};

// Runs every seed of a preset (seeds fan out over OpenMP threads), writes
// per-seed CSVs, then summarizes the directory.
RunReport run_preset(const std::string& name, const RunOptions& options);
// Same, from an explicit config.
RunReport run_config(const Config& cfg, const RunOptions& options);

// Reads trace_*.csv (and delta_q.csv, exploitability.csv when present) and
// writes summary.csv and final.csv next to them.
std::vector<std::filesystem::path> summarize(const std::filesystem::path& dir);

// Linear-interpolation percentile (Hyndman-Fan type 7), p in [0, 1].
double percentile(std::vector<double> values, double p);

// Frozen CSV headers.
inline constexpr std::string_view kTraceHeader =
    "k,W1_step,dTV_step,linf_step,l1_step,mean_reward,Q_snapshot_path,elapsed_ms";
inline constexpr std::string_view kQTableHeader = "state,action,q";
inline constexpr std::string_view kDeltaQHeader = "seed,T_gmf_q,T_gmf_v,delta_q";
inline constexpr std::string_view kExploitabilityHeader =
    "algorithm,N,S,A,seed,training_steps,C,C_ci95,samples,mode";
inline constexpr std::string_view kSummaryHeader = "variant,k,metric,n,median,p05,p95";
inline constexpr std::string_view kFinalHeader = "variant,metric,n,median,p05,p95,mean";

}  // namespace gmfg::exp
