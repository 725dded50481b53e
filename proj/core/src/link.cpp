#include "opsk/link.hpp"

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>

namespace opsk {

const char* to_string(LinkEnd end) {
  switch (end) {
    case LinkEnd::payload_exhausted: return "payload_exhausted";
    case LinkEnd::capsule_depleted: return "capsule_depleted";
    case LinkEnd::no_update_accepted: return "no_update_accepted";
  }
  return "?";
}

namespace {

enum class RxState { payload, armed, trailing };

class LinkReceiver {
 public:
  LinkReceiver(BitAllocation start, const UpdatePolicy& policy) : alloc_(start), policy_(policy) {}

  const BitAllocation& allocation() const { return alloc_; }

  /// Feeds one interval; returns the new allocation when an update completes.
  std::optional<BitAllocation> on_interval(bool silent, const std::optional<ClassCode>& code,
                                           BitSequence& payload_out) {
    switch (state_) {
      case RxState::payload:
        if (silent) {
          if (++silent_run_ >= policy_.silence_len) {
            state_ = RxState::armed;
            votes_.clear();
          }
          return std::nullopt;
        }
        silent_run_ = 0;
        emit(code, payload_out);
        return std::nullopt;
      case RxState::armed:
        if (silent || !code) return std::nullopt;
        votes_.push_back(*code);
        if (static_cast<int>(votes_.size()) < policy_.repeat_count) return std::nullopt;
        alloc_ = receiver_apply_update(votes_);
        state_ = RxState::trailing;
        silent_run_ = 0;
        return alloc_;
      case RxState::trailing:
        if (silent) {
          ++silent_run_;
          return std::nullopt;
        }
        if (silent_run_ < policy_.silence_len) return std::nullopt;
        state_ = RxState::payload;
        silent_run_ = 0;
        emit(code, payload_out);
        return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  void emit(const std::optional<ClassCode>& code, BitSequence& out) const {
    // A filter failure still costs one symbol slot; emit zeros to keep alignment.
    const BitSequence bits = code ? class_to_bits(*code, alloc_)
                                  : BitSequence(static_cast<std::size_t>(alloc_.total_bits()), 0);
    out.insert(out.end(), bits.begin(), bits.end());
  }

  BitAllocation alloc_;
  UpdatePolicy policy_;
  RxState state_ = RxState::payload;
  int silent_run_ = 0;
  std::vector<ClassCode> votes_;
};

}  // namespace

LinkResult run_adaptive_link(const ScenarioConfig& cfg, const UpdatePolicy& policy,
                             const BitSequence& payload, double capsule_mass) {
  policy.validate();
  const LinkPlan plan = plan_link(cfg);
  AdaptiveTransmitter tx(generate_odor_bank(cfg.allocation, cfg.quality, capsule_mass), policy,
                         cfg.release_mass);
  std::map<OdorId, PerceptualVector> perceived;
  for (const Odor& o : tx.bank().all_odors()) perceived.emplace(o.id, o.vector);

  LinkReceiver rx(cfg.allocation, policy);
  const ProcessorModel proc{cfg.pn};
  const double silence_threshold = default_silence_threshold(cfg.release_mass, plan.mass_ratio);
  RandomStream flow_rng = make_stream(cfg.seed, StreamPurpose::channel_flow);
  RandomStream proc_rng = make_stream(cfg.seed, StreamPurpose::processor_noise);
  const double t_a = plan.absorption_time;
  const double t_rest = plan.symbol_period - plan.absorption_time;

  LinkResult out;
  out.tx_allocations.push_back(tx.allocation());
  out.rx_allocations.push_back(rx.allocation());

  std::deque<AnnouncementStep> pending;
  BitAllocation announced_under = tx.allocation();
  std::size_t cursor = 0;
  std::int64_t last_checked = 0;
  const double retire_below = retirement_threshold(cfg.release_mass * plan.mass_ratio);
  std::vector<ReleaseEvent> live;
  while (true) {
    // Decide what the transmitter emits this interval.
    std::optional<OdorId> emitted;
    if (!pending.empty()) {
      const AnnouncementStep step = pending.front();
      pending.pop_front();
      if (step.kind == AnnouncementStep::Kind::symbol) {
        emitted = tx.announcement_capsule(step.code, announced_under);
        if (!emitted) {
          out.end = LinkEnd::capsule_depleted;
          break;
        }
        tx.send_from(*emitted);
      }
    } else {
      const auto k = static_cast<std::size_t>(tx.allocation().total_bits());
      if (payload.size() - cursor < k) {
        out.end = LinkEnd::payload_exhausted;
        break;
      }
      const std::span<const std::uint8_t> chunk(payload.data() + cursor, k);
      const ClassCode code = bits_to_class(chunk, tx.allocation());
      // A capsule that runs dry between check points forces the decision.
      const bool dry = !tx.can_send(code);
      if (dry || (tx.at_check_point() && last_checked != tx.symbols_sent())) {
        last_checked = tx.symbols_sent();
        const AdaptiveTransmitter::Decision d = tx.evaluate(dry);
        if (d.update_needed) {
          if (!d.chosen) {
            out.end = dry ? LinkEnd::capsule_depleted : LinkEnd::no_update_accepted;
            break;
          }
          announced_under = tx.allocation();
          const UpdateAnnouncement ann = announce_update(*d.chosen, announced_under, policy);
          tx.apply(*d.chosen);
          out.tx_allocations.push_back(tx.allocation());
          pending.assign(ann.schedule.begin(), ann.schedule.end());
          continue;
        }
      }
      emitted = tx.send(code);
      out.sent_bits.insert(out.sent_bits.end(), chunk.begin(), chunk.end());
      cursor += k;
      ++out.payload_symbols;
    }

    // One symbol interval of the channel.
    const std::int64_t n = ++out.intervals;
    const FlowSample u = sample_flow(plan.flow, n, flow_rng);
    if (emitted) live.push_back(ReleaseEvent{*emitted, cfg.release_mass, n, {0.0, 0.0, 0.0}, 0.0});
    for (ReleaseEvent& c : live) c = advance_drift(c, u, t_a);
    const AbsorptionResult absorbed = absorbed_mass(live, plan.geometry, plan.diffusion, n);
    const bool silent = detect_silence(absorbed, silence_threshold);

    std::optional<ClassCode> decoded;
    const PerceptualVector* truth = nullptr;
    if (!silent) {
      try {
        truth = &perceived.at(select_greatest_mass(absorbed));
      } catch (const SilenceError&) {
        truth = nullptr;
      }
    }
    const PerceptualVector measured =
        demodulate(truth ? *truth : PerceptualVector{}, proc, proc_rng);
    if (truth) decoded = decode_received(measured, rx.allocation());
    if (auto changed = rx.on_interval(silent, decoded, out.received_bits)) {
      out.rx_allocations.push_back(*changed);
    }

    for (ReleaseEvent& c : live) c = advance_drift(c, u, t_rest);
    std::erase_if(live, [&](const ReleaseEvent& c) {
      return contribution_bound(c, plan.geometry, plan.diffusion, plan.flow.mean) < retire_below;
    });
  }
  return out;
}

}  // namespace opsk
