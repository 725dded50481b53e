#include "opsk/random.hpp"

namespace opsk {

RandomStream make_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
  const auto p = static_cast<std::uint64_t>(purpose);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return RandomStream(seq);
}

double standard_normal(RandomStream& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

}  // namespace opsk
