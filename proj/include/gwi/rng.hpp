#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace gwi {

/// SplitMix64 finaliser; used only to expand seeds into engine state.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Purpose tags keep the random streams of different kernels disjoint even
/// when they share a master seed and replication index.
enum class Stream : std::uint64_t {
  path = 1,
  truncated_mean = 2,
  tail_ratio = 3,
  b_plus = 4,
  anti_clustering = 5,
  mixing_full = 6,
  mixing_block = 7,
  tail_process = 8,
  stable = 9,
  norming = 10,
  aggregate = 11,
  user = 100,
};

/// Identifies one replication: the stream is a pure function of
/// (master seed, purpose, replication index), never of thread layout.
struct StreamId {
  std::uint64_t master = 0;
  std::uint64_t replication = 0;
  Stream purpose = Stream::path;
};

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator so
/// it plugs into <random> and Boost.Random distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0x5EED) noexcept { reseed(seed); }
  explicit Rng(const StreamId& id) noexcept {
    std::uint64_t mix = id.master;
    std::uint64_t a = splitmix64(mix);
    mix ^= static_cast<std::uint64_t>(id.purpose) * 0xD1B54A32D192ED03ULL;
    std::uint64_t b = splitmix64(mix);
    mix ^= id.replication * 0xAEF17502108EF2D9ULL;
    reseed(a ^ b ^ splitmix64(mix));
  }

  void reseed(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

inline Rng make_rng(std::uint64_t master, Stream purpose,
                    std::uint64_t replication) noexcept {
  return Rng(StreamId{master, replication, purpose});
}

}  // namespace gwi
