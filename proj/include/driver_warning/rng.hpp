#pragma once

#include <cstdint>
#include <random>

namespace driver_warning
{

/**
 * @brief Seeded random stream with platform-independent draws.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the
 * standard. Distributions come from Boost.Random because the std
 * distributions are implementation-defined.
 */
class RngStream
{
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double normal();

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to decorrelate (seed, stream) pairs.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace driver_warning
