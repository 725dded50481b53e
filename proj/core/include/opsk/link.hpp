#pragma once

#include <cstdint>
#include <vector>

#include "opsk/adaptive.hpp"
#include "opsk/perceptual.hpp"
#include "opsk/simulation.hpp"

namespace opsk {

/// Why the transmitter stopped.
enum class LinkEnd { payload_exhausted, capsule_depleted, no_update_accepted };

const char* to_string(LinkEnd end);

struct LinkResult {
  BitSequence sent_bits;      // payload bits actually transmitted
  BitSequence received_bits;  // payload bits recovered, signaling excised
  std::vector<BitAllocation> tx_allocations;  // start allocation, then one per update
  std::vector<BitAllocation> rx_allocations;
  std::int64_t intervals = 0;
  std::int64_t payload_symbols = 0;
  LinkEnd end = LinkEnd::payload_exhausted;
};

/// Adaptive transmission over the simulated channel of `cfg`. The transmitter
/// encodes `payload` K bits at a time, checks for depletion every N payload
/// symbols, announces accepted updates with silences and repeated codes, and
/// stops when the payload has fewer than K bits left or a capsule runs dry.
/// The receiver tracks the allocation from the announcements alone.
LinkResult run_adaptive_link(const ScenarioConfig& cfg, const UpdatePolicy& policy,
                             const BitSequence& payload, double capsule_mass);

}  // namespace opsk
