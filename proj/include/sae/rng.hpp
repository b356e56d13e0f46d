#pragma once

#include <cstdint>

namespace sae {

// Mixes a (seed, key) pair into a new 64-bit seed for derived streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept;

// Counter-based seedable PRNG stream (xoshiro256++ core, splitmix64 seeding).
//
// Distinct (seed, stream_id) pairs give statistically independent streams, so
// parallel work can be made reproducible by assigning stream ids up front.
// All distribution draws below consume only this stream; none of them touch
// global state, which keeps every fit bit-reproducible for a fixed seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept;

  // Derived stream for a child task; deterministic in (this stream's identity, key).
  RngStream child(std::uint64_t key) const noexcept;

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept;

  // Standard normal via the polar method; second deviate is cached.
  double normal() noexcept;

  // Exponential with rate 1.
  double exponential() noexcept;

  // Gamma(shape, 1) via Marsaglia-Tsang, shape-boosted below 1.
  double gamma(double shape);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

}  // namespace sae
