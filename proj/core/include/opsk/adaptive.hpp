#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "opsk/perceptual.hpp"

namespace opsk {

/// Per-class counts over the last N transmitted symbols.
struct WindowStats {
  int window = 1;
  std::map<ClassCode, std::int64_t> counts;

  std::int64_t total() const;
  bool complete() const { return total() == window; }
};

/// Last N transmitted class codes, re-binnable after an allocation change.
class SymbolWindow {
 public:
  explicit SymbolWindow(int window);

  void push(const ClassCode& code);
  /// Maps every stored code from `from` to the coarser allocation `to`.
  void rebin(const BitAllocation& from, const BitAllocation& to);
  WindowStats stats() const;
  std::size_t size() const { return codes_.size(); }

 private:
  int window_;
  std::deque<ClassCode> codes_;
};

struct UpdatePolicy {
  int window = 100;                 // N, symbols between depletion checks
  double min_extension = 1.0;       // E, in symbols
  /// When set, E is this percentage of the symbols transmitted so far.
  std::optional<double> min_extension_percent;
  int silence_len = 2;              // silent intervals around an announcement
  int repeat_count = 3;             // R, odd

  /// Throws std::invalid_argument for N < 1, E < 0, silence_len < 1 or even R.
  void validate() const;
  double effective_min_extension(std::int64_t symbols_sent) const;
};

/// Code under `from` mapped onto a coarser allocation by dropping the low
/// bits of every reduced dimension.
ClassCode rebin_code(const ClassCode& code, const BitAllocation& from, const BitAllocation& to);

/// True iff some class would need more mass over the next N symbols, at the
/// last window's frequencies, than its capsules still hold.
bool needs_update(const OdorBank& bank, const WindowStats& stats, double per_symbol_mass);

/// One-bit reductions of `a` in pleasantness, intensity, edibility order,
/// skipping dimensions without bits. Throws std::invalid_argument for K = 1.
std::vector<BitAllocation> candidate_allocations(const BitAllocation& a);

/// Symbols until the first merged class of `candidate` runs dry, assuming the
/// last window's class frequencies persist. Merged classes nobody used impose
/// no limit; +inf when none was used.
double estimate_extension(const OdorBank& bank, const WindowStats& stats,
                          const BitAllocation& candidate, double per_symbol_mass);

struct CandidateExtension {
  BitAllocation allocation;
  double extension = 0.0;  // symbols
};

/// Argmax candidate if its extension reaches `min_extension`; first wins ties.
std::optional<BitAllocation> choose_update(std::span<const CandidateExtension> extensions,
                                           double min_extension);

/// Re-keys every capsule under `new_allocation`, which must remove exactly
/// one bit from one dimension of the bank's allocation.
OdorBank reinitialize_bank(const OdorBank& bank, const BitAllocation& new_allocation);

struct AnnouncementStep {
  enum class Kind { silence, symbol };
  Kind kind = Kind::silence;
  ClassCode code;  // valid for symbol steps, under the old allocation
};

struct UpdateAnnouncement {
  BitAllocation old_allocation;
  BitAllocation new_allocation;
  ClassCode announced;  // (n_p', n_i', n_e') as class indices of the old allocation
  std::vector<AnnouncementStep> schedule;
};

/// silence_len silences, R copies of the announced code, silence_len silences.
UpdateAnnouncement announce_update(const BitAllocation& new_allocation,
                                   const BitAllocation& old_allocation,
                                   const UpdatePolicy& policy);

/// Per-dimension majority (most frequent index, smaller index on ties) of the
/// codes decoded after the opening silence, read as the new bit counts.
BitAllocation receiver_apply_update(std::span<const ClassCode> decoded);

/// Transmitter side of the adaptive scheme: draws capsule mass per symbol,
/// tracks the last N symbols and runs the update decision of Algorithm 1.
class AdaptiveTransmitter {
 public:
  struct Decision {
    bool update_needed = false;
    std::vector<CandidateExtension> candidates;
    std::optional<BitAllocation> chosen;
  };

  AdaptiveTransmitter(OdorBank bank, UpdatePolicy policy, double per_symbol_mass);

  const OdorBank& bank() const { return bank_; }
  const BitAllocation& allocation() const { return bank_.allocation(); }
  const UpdatePolicy& policy() const { return policy_; }
  std::int64_t symbols_sent() const { return sent_; }

  /// True after every N-th payload symbol.
  bool at_check_point() const;

  /// True when the capsule chosen for `code` can supply one release.
  bool can_send(const ClassCode& code) const;

  /// Withdraws one release for `code` and records it. Throws
  /// std::runtime_error when the capsule is depleted.
  OdorId send(const ClassCode& code);

  /// Depletion check and candidate ranking for the current window. `forced`
  /// treats the bank as depleted, for a capsule that ran dry mid-window.
  Decision evaluate(bool forced = false) const;

  /// Re-initializes the bank under `next` and re-bins the window.
  void apply(const BitAllocation& next);

  /// Capsule able to emit the old-allocation class `code` during an
  /// announcement; nullopt when none can supply one release.
  std::optional<OdorId> announcement_capsule(const ClassCode& code,
                                             const BitAllocation& old_allocation) const;

  /// Withdraws one release from a specific capsule (announcements).
  void send_from(OdorId id);

 private:
  OdorBank bank_;
  UpdatePolicy policy_;
  double per_symbol_mass_;
  SymbolWindow window_;
  std::int64_t sent_ = 0;
};

}  // namespace opsk
