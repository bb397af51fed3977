#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "macsim/adversary.hpp"
#include "macsim/rational.hpp"
#include "macsim/report.hpp"
#include "macsim/types.hpp"

namespace macsim {

/// A packet sitting in a station's queue together with the round it arrived
/// there (by injection or adoption). Arrival order is queue order.
struct QueuedPacket {
  Packet packet;
  Round arrival = 0;
};

/// Read-only view of one station's own queue. Algorithms never see any other
/// station's queue; everything else they know arrives through channel
/// feedback.
class StationView {
 public:
  StationView(const std::vector<QueuedPacket>& queue) : queue_(&queue) {}
  std::span<const QueuedPacket> queue() const { return {queue_->data(), queue_->size()}; }
  bool empty() const { return queue_->empty(); }
  std::size_t size() const { return queue_->size(); }

 private:
  const std::vector<QueuedPacket>* queue_;
};

/// Distributed routing algorithm driven by the engine. The engine consults
/// only switched-on stations; a station controls its own future on-rounds
/// through the Reaction it returns (wakeup timers in the round-count sense).
class Algorithm {
 public:
  virtual ~Algorithm() = default;

  virtual std::string name() const = 0;

  /// First round station s is on; nullopt keeps it off for the whole run.
  virtual std::optional<Round> first_wake(StationId s) const = 0;

  /// Action for on-station s at round r, before the channel resolves.
  virtual StationAction act(StationId s, Round r, const StationView& view) = 0;

  /// Feedback for on-station s after the channel resolves. Every on station
  /// of the round observes; the reaction carries the adoption claim and the
  /// next on-round.
  virtual Reaction observe(StationId s, Round r, const Feedback& fb,
                           const StationView& view) = 0;

  /// A packet was injected into s at round r (called regardless of mode).
  virtual void on_injection(StationId /*s*/, Round /*r*/, const Packet& /*p*/) {}

  /// Clock tick at the start of every round, before actions, for all
  /// stations. Implementations may only advance local calendars here (season,
  /// phase and window arithmetic); no channel information is available.
  virtual void on_round_start(Round /*r*/) {}
};

struct AlgorithmSpec {
  std::string id;       // orchestra | count-hop | adjust-window | k-cycle | k-clique | k-subsets | null
  int k = 0;            // cap parameter for the oblivious family
  int mbtf_threshold = 0;  // 0 = default (thread group size)
  bool use_rrw = false;    // swap the list scheduler for plain round-robin withholding
};

struct AdversarySpec {
  std::string strategy;  // none | saturating | scripted | station-witness | pair-witness | adaptive-cap2
  Rational rho{1};
  Rational beta{1};
  std::string pattern = "round-robin";  // single-pair | single-target | round-robin | alternating-blocks
  StationId station = 0;
  StationId destination = 1;
  StationId station_b = 0;
  Round block_length = 0;
  std::vector<std::vector<Injection>> scripted;  // per-round rows for "scripted"
  std::string trace_file;                        // alternative source for "scripted"
};

struct EngineConfig {
  int n = 0;
  int energy_cap = 0;
  Round max_rounds = 0;
  AlgorithmSpec algorithm;
  AdversarySpec adversary;
  long long seed = 0;
  bool strict_control_bits = false;
  int control_bit_factor = 4;
  /// Keep per-round per-station queue depths in the report (costs n words a
  /// round; witnesses and audits want it, sweeps may not).
  bool record_station_queues = true;

  void validate() const;
};

/// The round-synchronous channel. One instance runs one simulation; state is
/// strictly sequential and deterministic.
class Engine {
 public:
  Engine(EngineConfig config, std::unique_ptr<Algorithm> algorithm,
         std::unique_ptr<InjectionSource> source);
  ~Engine();

  /// Executes one round; returns the outcome. Throws EngineError on a
  /// violated engine invariant.
  RoundOutcome step_round();

  /// Runs rounds until the configured horizon.
  void run_to_horizon();

  Round current_round() const { return next_round_ - 1; }
  bool finished() const { return next_round_ > config_.max_rounds; }

  const Algorithm& algorithm() const { return *algorithm_; }
  Algorithm& algorithm() { return *algorithm_; }
  const InjectionSource& source() const { return *source_; }

  long long total_queued() const { return total_queued_; }
  const std::vector<QueuedPacket>& station_queue(StationId s) const {
    return queues_[static_cast<std::size_t>(s)];
  }
  std::vector<StationId> on_set_for_round(Round r) const;

  /// Finalizes and returns the report (summary fields computed).
  ExperimentReport take_report();

 private:
  void apply_injections(Round r, const std::vector<Injection>& injections,
                        RoundRow& row);
  void record_delivery(Packet p, Round r);

  EngineConfig config_;
  std::unique_ptr<Algorithm> algorithm_;
  std::unique_ptr<InjectionSource> source_;

  Round next_round_ = 1;
  PacketId next_packet_id_ = 1;
  std::vector<std::vector<QueuedPacket>> queues_;
  std::vector<Round> next_on_;  // 0 = never
  long long total_queued_ = 0;
  long long injected_so_far_ = 0;
  long long delivered_so_far_ = 0;
  std::vector<bool> delivered_ids_;

  ExperimentReport report_;
};

/// Builds algorithm + adversary from the config, runs the full horizon and
/// returns the report. Identical configs produce identical reports.
ExperimentReport run_simulation(const EngineConfig& config);

std::unique_ptr<Algorithm> make_algorithm(const EngineConfig& config);
std::unique_ptr<InjectionSource> make_injection_source(const EngineConfig& config);

/// Materialized on/off matrix for the oblivious algorithms in the config
/// (k-cycle, k-clique, k-subsets), over [1, horizon].
ObliviousSchedule extract_oblivious_schedule(const EngineConfig& config, Round horizon);

}  // namespace macsim
