#pragma once

#include <optional>
#include <unordered_set>
#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// Plain-packet indirect routing at cap 2, organized in time windows of L
/// rounds that double whenever a window cannot clear its backlog. A window
/// runs three stages:
///   Gossip    n^2 phases; in phase (i,j) station j listens while a large i
///             signals its size class and conveys three capped counters by
///             coded transfer (packet = 1, silence = 0). Packets spent on
///             coding ride along: j adopts whatever is not addressed to it.
///   Main      either one slot per counted old packet of the large stations,
///             destination-sorted so each receiver can compute its own listen
///             slots, or, when someone's queue tops L, all rounds dedicated
///             to the smallest such station with listeners rotating.
///   Auxiliary a fixed (sender, receiver) round-robin that clears small
///             stations' backlog and the packets adopted during Gossip.
/// No message ever carries a control bit.
class AdjustWindow : public Algorithm {
 public:
  explicit AdjustWindow(int n);

  std::string name() const override { return "adjust-window"; }
  std::optional<Round> first_wake(StationId s) const override;
  StationAction act(StationId s, Round r, const StationView& view) override;
  Reaction observe(StationId s, Round r, const Feedback& fb,
                   const StationView& view) override;
  void on_injection(StationId s, Round r, const Packet& p) override;
  void on_round_start(Round r) override;

  long long window_length() const { return win_.L; }
  Round window_start() const { return win_.start; }
  long long windows_doubled() const { return doublings_; }
  long long main_length() const { return win_.main_len; }
  long long large_threshold() const { return win_.large_threshold; }

  static long long initial_window_length(int n);
  /// ceil(log2(x+1)); the fixed width of every coded number.
  static int lg(long long x);
  /// Big-endian bits of value, width bits wide.
  static std::vector<bool> code_bits(long long value, int width);
  static long long decode_bits(const std::vector<bool>& bits);

  /// One listener's view of a potential Main-stage source.
  struct SourceSummary {
    bool large = false;
    long long q = 0;         // source's counted backlog (its block length)
    long long to_me = 0;     // packets addressed to the listener
    long long below_me = 0;  // packets addressed below the listener's name
  };
  /// The listener's Main-stage listen slots, derived from gossip alone:
  /// blocks follow station order over the large sources, and within a block
  /// the packets for this listener sit after those with smaller destinations.
  static std::vector<std::pair<long long, long long>> main_listen_intervals(
      const std::vector<SourceSummary>& sources, long long main_len);

 private:
  struct Calendar {
    Round start = 1;
    long long L = 0;
    int lgL = 0;
    Round phase_len = 0;
    Round gossip_len = 0;
    Round main_len = 0;
    Round aux_len = 0;
    long long aux_phases = 0;
    long long large_threshold = 0;
  };
  struct MirrorEntry {
    PacketId id;
    StationId dest;
    Round arrival;
  };
  struct GossipRecord {
    bool large = false;
    bool exceeds = false;
    long long q = 0;
    long long to_me = 0;
    long long below_me = 0;
  };
  struct AwStation {
    std::vector<MirrorEntry> mirror;  // exact copy of the engine queue
    bool large = false;
    bool exceeds = false;
    long long q_capped = 0;
    std::vector<long long> count_to;
    std::vector<long long> count_below;
    std::vector<PacketId> main_block;  // snapshot sorted by (dest, arrival)
    std::vector<GossipRecord> records;
    std::vector<bool> rx_bits;
    std::unordered_set<PacketId> adopted_this_window;
    bool main_ready = false;
    long long block_start = 0;
    std::vector<std::pair<Round, Round>> main_duties;  // offsets, half-open
  };

  static Calendar make_calendar(int n, long long L, Round start);
  void snapshot_all(Round);
  bool decide_double(const AwStation& st) const;

  // Region helpers; offsets are relative to the window start.
  bool in_gossip(Round offset) const { return offset < win_.gossip_len; }
  bool in_main(Round offset) const {
    return offset >= win_.gossip_len && offset < win_.gossip_len + win_.main_len;
  }
  void decode_gossip(Round offset, int& i, int& j, int& psi) const;
  std::optional<StationId> dedicated_station(const AwStation& st) const;
  void ensure_main_plan(StationId s);
  long long coded_value(const AwStation& st, StationId j, int which) const;
  std::optional<PacketId> spend_packet(const AwStation& st, StationId prefer) const;
  std::optional<PacketId> aux_packet(const AwStation& st, StationId dest) const;

  Round next_duty_round(StationId s, Round r);
  Round pessimistic_entry_offset(StationId s, Round phase_len) const;

  int n_;
  Calendar win_;
  long long doublings_ = 0;
  std::vector<AwStation> stations_;
  std::vector<std::vector<int>> aux_positions_;  // per station, sorted in-phase slots
};

}  // namespace macsim
