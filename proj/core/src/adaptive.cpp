#include "opsk/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace opsk {

namespace {

// Slack for float drift when a capsule is emptied one release at a time.
constexpr double kMassSlack = 1e-9;

}  // namespace

std::int64_t WindowStats::total() const {
  std::int64_t t = 0;
  for (const auto& [code, n] : counts) t += n;
  return t;
}

SymbolWindow::SymbolWindow(int window) : window_(window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
}

void SymbolWindow::push(const ClassCode& code) {
  codes_.push_back(code);
  if (codes_.size() > static_cast<std::size_t>(window_)) codes_.pop_front();
}

void SymbolWindow::rebin(const BitAllocation& from, const BitAllocation& to) {
  for (ClassCode& c : codes_) c = rebin_code(c, from, to);
}

WindowStats SymbolWindow::stats() const {
  WindowStats s;
  s.window = window_;
  for (const ClassCode& c : codes_) ++s.counts[c];
  return s;
}

void UpdatePolicy::validate() const {
  if (window < 1) throw std::invalid_argument("update window N must be >= 1");
  if (!(min_extension >= 0.0)) throw std::invalid_argument("minimum extension E must be >= 0");
  if (min_extension_percent && !(*min_extension_percent >= 0.0)) {
    throw std::invalid_argument("minimum extension percentage must be >= 0");
  }
  if (silence_len < 1) throw std::invalid_argument("silence length must be >= 1");
  if (repeat_count < 1 || repeat_count % 2 == 0) {
    throw std::invalid_argument("announcement repeat count must be odd and >= 1");
  }
}

double UpdatePolicy::effective_min_extension(std::int64_t symbols_sent) const {
  if (min_extension_percent) {
    return *min_extension_percent / 100.0 * static_cast<double>(symbols_sent);
  }
  return min_extension;
}

ClassCode rebin_code(const ClassCode& code, const BitAllocation& from, const BitAllocation& to) {
  ClassCode out;
  for (Dimension d : kDimensions) {
    const int drop = from.bits(d) - to.bits(d);
    if (drop < 0) throw std::invalid_argument("rebin target must not add bits");
    out[d] = code[d] >> drop;
  }
  return out;
}

bool needs_update(const OdorBank& bank, const WindowStats& stats, double per_symbol_mass) {
  for (const auto& [code, count] : stats.counts) {
    if (count <= 0) continue;
    if (static_cast<double>(count) * per_symbol_mass > bank.remaining_mass(code)) return true;
  }
  return false;
}

std::vector<BitAllocation> candidate_allocations(const BitAllocation& a) {
  if (a.total_bits() <= 1) {
    throw std::invalid_argument("allocation " + a.to_string() + " cannot be reduced further");
  }
  std::vector<BitAllocation> out;
  for (Dimension d : kDimensions) {
    if (a.bits(d) > 0) out.push_back(a.reduced(d));
  }
  return out;
}

double estimate_extension(const OdorBank& bank, const WindowStats& stats,
                          const BitAllocation& candidate, double per_symbol_mass) {
  if (!(per_symbol_mass > 0.0)) throw std::invalid_argument("per-symbol mass must be > 0");
  const BitAllocation& from = bank.allocation();
  std::map<ClassCode, double> pooled;
  for (const auto& [code, odors] : bank.capsules()) {
    for (const Odor& o : odors) pooled[classify(o.vector, candidate)] += o.remaining_mass;
  }
  std::map<ClassCode, std::int64_t> merged_counts;
  for (const auto& [code, n] : stats.counts) merged_counts[rebin_code(code, from, candidate)] += n;

  const double window = static_cast<double>(stats.window);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [code, n] : merged_counts) {
    if (n <= 0) continue;
    const double rate = static_cast<double>(n) / window;  // per symbol
    const double supply = pooled[code];
    best = std::min(best, supply / (rate * per_symbol_mass));
  }
  return best;
}

std::optional<BitAllocation> choose_update(std::span<const CandidateExtension> extensions,
                                           double min_extension) {
  if (extensions.empty()) throw std::invalid_argument("no candidate allocations");
  const CandidateExtension* best = &extensions.front();
  for (const CandidateExtension& c : extensions) {
    if (c.extension > best->extension) best = &c;
  }
  if (best->extension >= min_extension) return best->allocation;
  return std::nullopt;
}

namespace {

bool is_single_step_reduction(const BitAllocation& from, const BitAllocation& to) {
  int reduced = 0;
  for (Dimension d : kDimensions) {
    const int delta = from.bits(d) - to.bits(d);
    if (delta == 1) {
      ++reduced;
    } else if (delta != 0) {
      return false;
    }
  }
  return reduced == 1;
}

}  // namespace

OdorBank reinitialize_bank(const OdorBank& bank, const BitAllocation& new_allocation) {
  if (!is_single_step_reduction(bank.allocation(), new_allocation)) {
    throw std::invalid_argument("update from " + bank.allocation().to_string() + " to " +
                                new_allocation.to_string() +
                                " must remove exactly one bit from one dimension");
  }
  OdorBank::CapsuleMap capsules;
  for (const auto& [code, odors] : bank.capsules()) {
    for (const Odor& o : odors) capsules[classify(o.vector, new_allocation)].push_back(o);
  }
  for (auto& [code, odors] : capsules) {
    std::sort(odors.begin(), odors.end(),
              [](const Odor& a, const Odor& b) { return a.id < b.id; });
  }
  return OdorBank(new_allocation, std::move(capsules));
}

UpdateAnnouncement announce_update(const BitAllocation& new_allocation,
                                   const BitAllocation& old_allocation,
                                   const UpdatePolicy& policy) {
  policy.validate();
  if (!is_single_step_reduction(old_allocation, new_allocation)) {
    throw std::invalid_argument("only single-bit updates can be announced");
  }
  ClassCode announced;
  for (Dimension d : kDimensions) {
    announced[d] = static_cast<std::uint32_t>(new_allocation.bits(d));
  }
  if (!is_valid(announced, old_allocation)) {
    throw std::invalid_argument("new allocation " + new_allocation.to_string() +
                                " is not representable as a class of " +
                                old_allocation.to_string());
  }
  UpdateAnnouncement out{old_allocation, new_allocation, announced, {}};
  for (int k = 0; k < policy.silence_len; ++k) out.schedule.push_back({});
  for (int k = 0; k < policy.repeat_count; ++k) {
    out.schedule.push_back({AnnouncementStep::Kind::symbol, announced});
  }
  for (int k = 0; k < policy.silence_len; ++k) out.schedule.push_back({});
  return out;
}

BitAllocation receiver_apply_update(std::span<const ClassCode> decoded) {
  if (decoded.empty()) throw std::invalid_argument("no announcement symbols decoded");
  std::array<int, 3> bits{};
  for (Dimension d : kDimensions) {
    std::map<std::uint32_t, int> votes;
    for (const ClassCode& c : decoded) ++votes[c[d]];
    std::uint32_t winner = votes.begin()->first;
    int most = 0;
    for (const auto& [value, n] : votes) {
      if (n > most) {
        most = n;
        winner = value;
      }
    }
    bits[static_cast<int>(d)] = static_cast<int>(winner);
  }
  return BitAllocation(bits[0], bits[1], bits[2]);
}

AdaptiveTransmitter::AdaptiveTransmitter(OdorBank bank, UpdatePolicy policy,
                                         double per_symbol_mass)
    : bank_(std::move(bank)),
      policy_(policy),
      per_symbol_mass_(per_symbol_mass),
      window_(policy.window) {
  policy_.validate();
  if (!(per_symbol_mass > 0.0)) throw std::invalid_argument("per-symbol mass must be > 0");
}

bool AdaptiveTransmitter::at_check_point() const {
  return sent_ > 0 && sent_ % policy_.window == 0;
}

bool AdaptiveTransmitter::can_send(const ClassCode& code) const {
  return bank_.select_capsule(code).remaining_mass >= per_symbol_mass_ * (1.0 - kMassSlack);
}

OdorId AdaptiveTransmitter::send(const ClassCode& code) {
  const Odor& capsule = bank_.select_capsule(code);
  if (capsule.remaining_mass < per_symbol_mass_ * (1.0 - kMassSlack)) {
    throw std::runtime_error("capsule for " + to_string(code) + " is depleted");
  }
  const OdorId id = capsule.id;
  bank_.withdraw_from(id, std::min(per_symbol_mass_, capsule.remaining_mass));
  window_.push(code);
  ++sent_;
  return id;
}

AdaptiveTransmitter::Decision AdaptiveTransmitter::evaluate(bool forced) const {
  Decision out;
  const WindowStats stats = window_.stats();
  out.update_needed = forced || needs_update(bank_, stats, per_symbol_mass_);
  if (!out.update_needed || allocation().total_bits() <= 1) return out;
  for (const BitAllocation& cand : candidate_allocations(allocation())) {
    out.candidates.push_back({cand, estimate_extension(bank_, stats, cand, per_symbol_mass_)});
  }
  out.chosen = choose_update(out.candidates, policy_.effective_min_extension(sent_));
  return out;
}

void AdaptiveTransmitter::apply(const BitAllocation& next) {
  const BitAllocation previous = allocation();
  bank_ = reinitialize_bank(bank_, next);
  window_.rebin(previous, next);
}

std::optional<OdorId> AdaptiveTransmitter::announcement_capsule(
    const ClassCode& code, const BitAllocation& old_allocation) const {
  std::optional<OdorId> best;
  double best_mass = per_symbol_mass_ * (1.0 - kMassSlack);
  for (const Odor& o : bank_.all_odors()) {
    if (classify(o.vector, old_allocation) != code) continue;
    if (o.remaining_mass >= best_mass && (!best || o.remaining_mass > best_mass)) {
      best = o.id;
      best_mass = o.remaining_mass;
    }
  }
  return best;
}

void AdaptiveTransmitter::send_from(OdorId id) {
  const double remaining = bank_.odor(id).remaining_mass;
  if (remaining < per_symbol_mass_ * (1.0 - kMassSlack)) {
    throw std::runtime_error("capsule " + std::to_string(id.value) + " is depleted");
  }
  bank_.withdraw_from(id, std::min(per_symbol_mass_, remaining));
}

}  // namespace opsk
