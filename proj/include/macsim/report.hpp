#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "macsim/rational.hpp"
#include "macsim/types.hpp"

namespace macsim {

/// Echo of the configuration a report was produced from. Kept flat and
/// string-typed where it feeds serialization so two runs of the same config
/// serialize byte-identically.
struct ConfigEcho {
  std::string algorithm;
  int n = 0;
  int energy_cap = 0;
  Round max_rounds = 0;
  Rational rho{0};
  Rational beta{1};
  std::string adversary;
  std::string pattern;
  int k = 0;
  long long seed = 0;
  bool strict_control_bits = false;
  int control_bit_factor = 4;
  int mbtf_threshold = 0;
  bool use_rrw = false;
};

struct RoundRow {
  Round round = 0;
  long long total_queued = 0;
  int on_count = 0;
  FeedbackKind feedback = FeedbackKind::Silent;
  std::optional<PacketId> delivered_id;
  int control_bits = 0;
  int injected = 0;
  std::vector<std::int32_t> per_station_queues;
};

struct PacketRow {
  PacketId id = 0;
  Round injection_round = 0;
  StationId injection_station = 0;
  StationId destination = 0;
  std::optional<Round> delivery_round;
  int hop_count = 1;
};

struct ReportSummary {
  Round rounds_executed = 0;
  long long injected = 0;
  long long delivered = 0;
  long long undelivered = 0;
  long long max_queue = 0;
  long long max_latency_delivered = 0;
  long long max_undelivered_age = 0;
  int max_on_count = 0;
  int max_control_bits = 0;
  long long light_rounds = 0;
  long long collision_rounds = 0;
  int max_hop_count = 0;
};

struct ExperimentReport {
  ConfigEcho config;
  std::vector<RoundRow> per_round;
  std::vector<PacketRow> per_packet;
  ReportSummary summary;
};

/// Result of replaying a report's bookkeeping: packet conservation per round
/// prefix and exactly-once delivery.
struct AuditResult {
  bool pass = true;
  std::optional<Round> first_violation;
  std::string detail;
};

AuditResult conservation_audit(const ExperimentReport& report);

}  // namespace macsim
