#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace gmfg {

// Philox4x32-10 block function (Salmon et al., Random123 family).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

std::uint64_t splitmix64(std::uint64_t x);

// Fold a stream path (seed, purpose, index, ...) into one 64-bit key.
std::uint64_t derive_stream_key(std::uint64_t parent, std::uint64_t id);

// Fixed purpose tags for stream splitting. Values are part of the
// reproducibility contract; never renumber.
enum class Stream : std::uint64_t {
  inner = 1,
  behavior = 2,
  environment = 3,
  representative = 4,
  init = 5,
  probe = 6,
  players = 7,
  evaluation = 8,
  model = 9,
};

// Counter-based generator: a 64-bit stream key selects the Philox key and
// the 64-bit block index runs through counter words 0-1. Splitting derives
// child keys without consuming parent state.
class Rng {
 public:
  using result_type = std::uint32_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;
  std::uint64_t next_u64() noexcept;

  // 53-bit uniform in [0, 1).
  double uniform() noexcept;
  // floor(uniform() * n); n >= 1.
  int uniform_int(int n) noexcept;
  bool bernoulli(double p) noexcept;
  // Inverse-CDF draw from nonnegative weights (need not be normalized).
  std::size_t categorical(std::span<const double> weights) noexcept;
  // Standard exponential via -log(1 - u).
  double exponential() noexcept;

  Rng split(std::uint64_t id) const noexcept;
  Rng split(Stream purpose) const noexcept { return split(static_cast<std::uint64_t>(purpose)); }
  Rng split(Stream purpose, std::uint64_t index) const noexcept {
    return split(purpose).split(index);
  }

  std::uint64_t stream_key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return block_ * 4 + used_; }

 private:
  void refill() noexcept;

  std::uint64_t key_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  unsigned used_ = 4;
};

}  // namespace gmfg
