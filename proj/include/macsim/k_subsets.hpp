#pragma once

#include <deque>
#include <map>
#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// All k-element subsets of the stations in lexicographic order; round t
/// belongs to thread (t-1) mod C(n,k) and only that subset's stations are on.
/// Refuses to build when C(n,k) exceeds the configured ceiling (default 10^4,
/// MACSIM_MAX_GAMMA overrides).
struct ThreadLayout {
  int n = 0;
  int k = 0;
  long long gamma = 0;
  std::vector<std::vector<StationId>> subsets;   // sorted members, lex order
  std::vector<std::vector<int>> threads_of;      // station -> thread indices
  std::vector<std::vector<int>> eligible_pairs;  // (v*n+w) -> threads with both

  static ThreadLayout build(int n, int k);

  int thread_of(Round r) const { return static_cast<int>((r - 1) % gamma); }
  bool phase_boundary(Round r) const { return (r - 1) % gamma == 0; }
  const std::vector<int>& eligible(StationId v, StationId w) const {
    return eligible_pairs[static_cast<std::size_t>(v) * n + w];
  }
  Round next_thread_round(StationId s, Round r) const;
};

/// Direct routing over subset threads. Injections buffer for one phase, then
/// spread over the threads containing both endpoints so the per-thread totals
/// for each source/destination pair stay within one of each other. Each
/// thread runs its own replicated-list scheduler: the duty station drains one
/// packet per thread round, flags itself when its backlog passes the
/// threshold and jumps to the list front; silence passes duty on. A config
/// switch replaces this with plain withholding round robin.
class KSubsets : public Algorithm {
 public:
  KSubsets(int n, int k, int big_threshold = 0, bool use_rrw = false);

  std::string name() const override { return "k-subsets"; }
  std::optional<Round> first_wake(StationId s) const override;
  StationAction act(StationId s, Round r, const StationView& view) override;
  Reaction observe(StationId s, Round r, const Feedback& fb,
                   const StationView& view) override;
  void on_injection(StationId s, Round r, const Packet& p) override;
  void on_round_start(Round r) override;

  const ThreadLayout& layout() const { return layout_; }
  /// Largest spread (max - min) across any pair's eligible-thread counters.
  long long max_allocation_imbalance() const;

 private:
  struct AllocEntry {
    PacketId id;
    Round allocated_at;
  };
  struct ThreadState {
    std::vector<StationId> list;  // duty order; replicated across members
    int pos = 0;
    Round phase_start = 1;  // withholding mode only
    Round updated_at = 0;
  };
  struct StationState {
    std::vector<std::pair<PacketId, StationId>> pending;  // injected this phase
    // counters[w] aligned with layout.eligible(s, w)
    std::map<StationId, std::vector<long long>> counters;
    std::map<int, std::deque<AllocEntry>> thread_queues;
  };

  void allocate_pending(Round r);

  ThreadLayout layout_;
  int big_threshold_;
  bool use_rrw_;
  std::vector<StationState> stations_;
  std::vector<ThreadState> threads_;
};

}  // namespace macsim
