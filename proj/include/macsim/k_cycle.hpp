#pragma once

#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// Chain of overlapping station groups arranged in a cycle. Groups of size k
/// overlap in one connector station; the last group carries station 0 as its
/// closing connector back to the first group. When the tail group is already
/// full of k stations, station 0 rides along as an extra member, so one more
/// station than k can be on during that group's segments.
struct GroupLayout {
  int n = 0;
  int requested_k = 0;
  int effective_k = 0;
  Round delta = 0;  // length of one activity segment
  int max_on = 0;
  /// Member lists sorted by name; the last group includes station 0.
  std::vector<std::vector<StationId>> groups;
  /// Dummy slots left in the last group after seating its stations.
  int dummies_in_last = 0;
  /// groups[i]'s ferry to groups[(i+1) % count]: adopts packets heard in
  /// group i whose destination lies outside it.
  std::vector<StationId> outbound_connector;
  /// groups_of[s]: indices of the groups containing s (one or two).
  std::vector<std::vector<int>> groups_of;

  static GroupLayout build(int n, int k);

  int group_count() const { return static_cast<int>(groups.size()); }
  int active_group(Round r) const {
    return static_cast<int>(((r - 1) / delta) % group_count());
  }
  Round segment_end(Round r) const { return ((r - 1) / delta + 1) * delta; }
  bool in_group(StationId s, int g) const;
  /// First round > r in which a group containing s is active.
  Round next_active_round(StationId s, Round r) const;
};

/// Token-passing routing over the group cycle: the active group's token
/// holder drains its eligible backlog one packet per round, silence moves the
/// token, a full token lap ends the group's phase and turns fresh packets
/// into transmittable ones. Packets for other groups hop connector to
/// connector around the cycle.
class KCycle : public Algorithm {
 public:
  KCycle(int n, int k);

  std::string name() const override { return "k-cycle"; }
  std::optional<Round> first_wake(StationId s) const override;
  StationAction act(StationId s, Round r, const StationView& view) override;
  Reaction observe(StationId s, Round r, const Feedback& fb,
                   const StationView& view) override;

  const GroupLayout& layout() const { return layout_; }
  Round phase_start_of_group(int g) const { return group_states_[g].phase_start; }

 private:
  struct GroupState {
    int holder_idx = 0;
    Round phase_start = 1;
    Round updated_at = 0;  // guards the once-per-round shared update
  };

  bool eligible(StationId holder, int g, const QueuedPacket& q, Round r) const;

  GroupLayout layout_;
  std::vector<GroupState> group_states_;
};

}  // namespace macsim
