#pragma once

#include <cstdint>
#include <random>

namespace opsk {

/// Every stochastic operation takes one of these explicitly.
using RandomStream = std::mt19937_64;

/// Independent sub-streams of one scenario seed. Keeping each consumer on its
/// own stream lets configurations that differ in one parameter share the
/// remaining draws (common random numbers).
enum class StreamPurpose : std::uint64_t {
  payload_bits = 1,
  channel_flow = 2,
  processor_noise = 3,
  symbol_source = 4,
  distribution = 5,
};

/// Deterministic stream for (seed, purpose, index).
RandomStream make_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index = 0);

/// One N(0, 1) draw.
double standard_normal(RandomStream& rng);

}  // namespace opsk
