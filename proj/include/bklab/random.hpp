#pragma once

// Counter-based random streams (Philox4x32-10). A stream is addressed by
// (seed, stream_id, replica); the i-th draw depends only on that address and
// i, so replicas can be generated in any order on any number of threads.

#include <array>
#include <cstdint>

namespace bklab {

/// One Philox4x32 block: 10 rounds over `counter` under `key`.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of two words, used to derive substream ids.
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept;

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t replica = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint32_t replica() const noexcept { return replica_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint32_t replica_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace bklab
