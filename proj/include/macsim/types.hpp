#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace macsim {

using StationId = int;
using Round = long long;
using PacketId = long long;

/// A routed unit. Content is not modeled; only identity, addressing and the
/// relay history matter to the channel.
struct Packet {
  PacketId id = 0;
  StationId destination = 0;
  Round injection_round = 0;
  StationId injection_station = 0;
  /// Stations that have held the packet, starting with the injection station.
  /// Consecutive entries differ; adoption appends.
  std::vector<StationId> hops;
  std::optional<Round> delivery_round;

  int hop_count() const { return static_cast<int>(hops.size()); }
};

/// Schedule taught by an Orchestra conductor to one learner: the rounds (in
/// 1..n-1) the learner must listen during that conductor's next season, plus
/// the heavy-queue toggle. Costs n bits on the wire: n-1 for the round set,
/// one for the toggle.
struct TeachControl {
  StationId learner = 0;
  std::vector<int> listen_rounds;
  bool big = false;
  int station_count = 0;

  int bit_length() const { return station_count; }
};

/// Per-destination old-packet counts reported by a worker (one slot per
/// station other than the sender), fixed-width encoded.
struct CountReportControl {
  std::vector<long long> counts;
  int width = 0;

  int bit_length() const { return width * static_cast<int>(counts.size()); }
};

/// Coordinator's reply to one worker: the worker's transmit offset within
/// each delivery stage plus every stage's total length.
struct OffsetAssignControl {
  StationId worker = 0;
  std::vector<long long> offsets;
  std::vector<long long> totals;
  int width = 0;

  int bit_length() const {
    return width * static_cast<int>(offsets.size() + totals.size());
  }
};

/// Single-bit queue-pressure flag used by the per-thread list scheduler.
struct BigFlagControl {
  bool big = false;

  int bit_length() const { return 1; }
};

using ControlPayload = std::variant<std::monostate, TeachControl, CountReportControl,
                                    OffsetAssignControl, BigFlagControl>;

inline int control_bit_length(const ControlPayload& payload) {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::monostate>)
          return 0;
        else
          return p.bit_length();
      },
      payload);
}

/// One round's transmission: at most one packet plus control content whose
/// bit cost is recorded for the budget audit.
struct Message {
  StationId sender = 0;
  std::optional<Packet> packet;
  ControlPayload control;

  int control_bits() const { return control_bit_length(control); }
};

enum class Mode { Off, Listen, Transmit };

/// What a switched-on station does in a round. A transmitted packet is named
/// by id; the engine copies it out of the sender's queue.
struct StationAction {
  Mode mode = Mode::Listen;
  std::optional<PacketId> transmit_packet;
  ControlPayload control;

  static StationAction listen() { return {}; }
  static StationAction send_packet(PacketId id) {
    StationAction a;
    a.mode = Mode::Transmit;
    a.transmit_packet = id;
    return a;
  }
  static StationAction send_control(ControlPayload payload) {
    StationAction a;
    a.mode = Mode::Transmit;
    a.control = std::move(payload);
    return a;
  }
};

enum class FeedbackKind { Silent, Collision, Heard };

/// Channel feedback, identical for every switched-on station in the round.
struct Feedback {
  FeedbackKind kind = FeedbackKind::Silent;
  std::optional<Message> message;
};

/// What a station reports back after seeing the round's feedback: whether it
/// adopts a heard-but-undelivered packet, and when it will next be on.
/// next_on == 0 means "on again next round"; next_on > current round arms the
/// wakeup timer accordingly; never_again parks the station for good.
struct Reaction {
  bool adopt = false;
  Round next_on = 0;
  bool never_again = false;

  static Reaction stay_on() { return {}; }
  static Reaction wake_at(Round r) {
    Reaction x;
    x.next_on = r;
    return x;
  }
  static Reaction sleep_forever() {
    Reaction x;
    x.never_again = true;
    return x;
  }
};

/// The engine's record of one executed round.
struct RoundOutcome {
  Round round = 0;
  std::vector<StationId> on_stations;
  std::vector<StationId> transmitters;
  Feedback feedback;
  std::optional<Packet> delivered;
  std::optional<std::pair<StationId, Packet>> adopted_by;
};

enum class EngineErrorCode {
  InvalidConfig,
  EnergyCapViolation,
  DuplicateDelivery,
  PhantomTransmit,
  AdoptionConflict,
  InvalidAction,
  AlgorithmAssertion,
};

inline const char* engine_error_name(EngineErrorCode c) {
  switch (c) {
    case EngineErrorCode::InvalidConfig: return "InvalidConfig";
    case EngineErrorCode::EnergyCapViolation: return "EnergyCapViolation";
    case EngineErrorCode::DuplicateDelivery: return "DuplicateDelivery";
    case EngineErrorCode::PhantomTransmit: return "PhantomTransmit";
    case EngineErrorCode::AdoptionConflict: return "AdoptionConflict";
    case EngineErrorCode::InvalidAction: return "InvalidAction";
    case EngineErrorCode::AlgorithmAssertion: return "AlgorithmAssertion";
  }
  return "Unknown";
}

class EngineError : public std::runtime_error {
 public:
  EngineError(EngineErrorCode code, Round round, const std::string& detail)
      : std::runtime_error(std::string(engine_error_name(code)) + " at round " +
                           std::to_string(round) + ": " + detail),
        code_(code),
        round_(round) {}

  EngineErrorCode code() const { return code_; }
  Round round() const { return round_; }

 private:
  EngineErrorCode code_;
  Round round_;
};

}  // namespace macsim
