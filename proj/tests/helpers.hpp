#pragma once

#include <functional>
#include <map>
#include <vector>

#include "macsim/engine.hpp"

namespace macsim::test {

/// Fully scripted per-round behaviour for engine-level tests: which stations
/// are on, who transmits what, who adopts, all keyed by round number.
class ScriptedAlgorithm : public Algorithm {
 public:
  struct RoundScript {
    std::vector<StationId> on;
    // station -> packet id to transmit (-1 = transmit control-free message
    // without packet is not allowed here; use explicit entries only)
    std::map<StationId, PacketId> transmit;
    // station -> claim adoption of the heard packet this round
    std::vector<StationId> adopters;
  };

  explicit ScriptedAlgorithm(std::map<Round, RoundScript> script)
      : script_(std::move(script)) {}

  std::string name() const override { return "scripted"; }

  std::optional<Round> first_wake(StationId s) const override {
    for (const auto& [round, rs] : script_)
      for (StationId id : rs.on)
        if (id == s) return round;
    return std::nullopt;
  }

  StationAction act(StationId s, Round r, const StationView&) override {
    auto it = script_.find(r);
    if (it == script_.end()) return StationAction::listen();
    auto t = it->second.transmit.find(s);
    if (t == it->second.transmit.end()) return StationAction::listen();
    return StationAction::send_packet(t->second);
  }

  Reaction observe(StationId s, Round r, const Feedback&, const StationView&) override {
    Reaction re;
    auto it = script_.find(r);
    if (it != script_.end())
      for (StationId a : it->second.adopters)
        if (a == s) re.adopt = true;
    // Wake exactly at the next scripted round that lists this station.
    auto next = script_.upper_bound(r);
    while (next != script_.end()) {
      for (StationId id : next->second.on)
        if (id == s) {
          re.next_on = next->first;
          return re;
        }
      ++next;
    }
    re.never_again = true;
    return re;
  }

 private:
  std::map<Round, RoundScript> script_;
};

/// Obeys a fixed on/off schedule; among the on stations, the smallest-named
/// one holding a packet transmits its oldest packet. Collision-free and
/// work-conserving, which makes it a strong baseline for witness tests.
class ScheduledGreedy : public Algorithm {
 public:
  explicit ScheduledGreedy(ObliviousSchedule schedule) : sched_(std::move(schedule)) {}

  std::string name() const override { return "scheduled-greedy"; }

  std::optional<Round> first_wake(StationId s) const override {
    for (Round r = 1; r <= sched_.horizon; ++r)
      if (sched_.on(s, r)) return r;
    return std::nullopt;
  }

  StationAction act(StationId s, Round r, const StationView& view) override {
    // Lowest-named on station with a packet transmits; the rest listen.
    for (StationId lower = 0; lower < s; ++lower)
      if (sched_.on(lower, r) && queue_size_[lower] > 0) return StationAction::listen();
    if (!view.empty()) return StationAction::send_packet(view.queue().front().packet.id);
    return StationAction::listen();
  }

  Reaction observe(StationId s, Round r, const Feedback& fb, const StationView&) override {
    if (fb.kind == FeedbackKind::Heard && fb.message->sender == s)
      --queue_size_[s];
    Reaction re;
    Round next = 0;
    for (Round cand = r + 1; cand <= sched_.horizon; ++cand)
      if (sched_.on(s, cand)) {
        next = cand;
        break;
      }
    if (next == 0) return Reaction::sleep_forever();
    re.next_on = next;
    return re;
  }

  void on_injection(StationId s, Round, const Packet&) override { ++queue_size_[s]; }

 private:
  ObliviousSchedule sched_;
  std::map<StationId, long long> queue_size_;
};

inline EngineConfig basic_config(int n, int cap, Round rounds, const std::string& algorithm,
                                 const std::string& rho, const std::string& beta) {
  EngineConfig cfg;
  cfg.n = n;
  cfg.energy_cap = cap;
  cfg.max_rounds = rounds;
  cfg.algorithm.id = algorithm;
  cfg.adversary.strategy = "saturating";
  cfg.adversary.rho = *Rational::parse(rho);
  cfg.adversary.beta = *Rational::parse(beta);
  return cfg;
}

}  // namespace macsim::test
