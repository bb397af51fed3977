#pragma once

#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// Coordinator-scheduled direct routing at cap 2. Phases alternate a short
/// bookkeeping prologue with per-destination delivery stages: every worker
/// reports its per-destination backlog to the coordinator in one message, the
/// coordinator answers each worker with its transmit offsets and the stage
/// totals, and then each destination in turn listens through a stage whose
/// slots are exactly the reported packets. Packets transmitted in a phase
/// were injected in the previous one.
class CountHop : public Algorithm {
 public:
  CountHop(int n, Round horizon, long long beta_floor);

  std::string name() const override { return "count-hop"; }
  std::optional<Round> first_wake(StationId s) const override;
  StationAction act(StationId s, Round r, const StationView& view) override;
  Reaction observe(StationId s, Round r, const Feedback& fb,
                   const StationView& view) override;
  void on_round_start(Round r) override;

  Round phase_start() const { return phase_start_; }

 private:
  struct Interval {
    Round from = 0;
    Round to = 0;  // half-open
  };

  long long old_count_for(const StationView& view, StationId dest) const;
  PacketId first_old_packet_for(const StationView& view, StationId dest) const;
  Reaction next_duty(StationId s, Round r) const;

  int n_;
  int width_;

  Round phase_start_;       // current phase's first round
  Round next_phase_start_;  // 0 until the coordinator has the counts

  // Coordinator-side plan for the current phase.
  std::vector<std::vector<long long>> counts_;  // [worker][dest]
  std::vector<long long> worker_total_;         // per dest, workers only
  std::vector<long long> totals_;               // per dest, including coordinator
  std::vector<Round> stage_start_;              // per dest
  std::vector<std::vector<long long>> offsets_;  // [worker][dest]

  // What each station has learned it must do this phase.
  std::vector<std::vector<Interval>> duties_;
  std::vector<Round> known_next_start_;
};

}  // namespace macsim
