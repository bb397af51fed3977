#pragma once

#include <utility>
#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// Stations split into 2n/k disjoint sets of k/2; every unordered pair of
/// sets forms a k-station clique that owns one round per rotation. k shrinks
/// to the largest even divisor of 2n not above 2n/3 when the requested value
/// does not fit.
struct PairLayout {
  int n = 0;
  int requested_k = 0;
  int effective_k = 0;
  int set_size = 0;   // k/2
  int set_count = 0;  // 2n/k
  std::vector<std::pair<int, int>> pairs;  // lexicographic (a, b), a < b
  std::vector<std::vector<int>> pairs_of;  // station -> pair indices

  static PairLayout build(int n, int k);

  int pair_count() const { return static_cast<int>(pairs.size()); }
  int active_pair(Round r) const { return static_cast<int>((r - 1) % pair_count()); }
  int set_of(StationId s) const { return s / set_size; }
  std::vector<StationId> members_of(int pair_index) const;
  bool station_in_pair(StationId s, int pair_index) const;
  /// First round > r in which a pair containing s is active.
  Round next_active_round(StationId s, Round r) const;
};

/// Direct routing over the pair rotation: within a pair's rounds a token
/// walks its k stations; the holder sends only backlog addressed inside the
/// pair, so every heard packet lands on a switched-on destination.
class KClique : public Algorithm {
 public:
  KClique(int n, int k);

  std::string name() const override { return "k-clique"; }
  std::optional<Round> first_wake(StationId s) const override;
  StationAction act(StationId s, Round r, const StationView& view) override;
  Reaction observe(StationId s, Round r, const Feedback& fb,
                   const StationView& view) override;

  const PairLayout& layout() const { return layout_; }

 private:
  struct PairState {
    int holder_idx = 0;
    Round phase_start = 1;
    Round updated_at = 0;
  };

  PairLayout layout_;
  std::vector<std::vector<StationId>> members_;  // cached per pair, sorted
  std::vector<PairState> pair_states_;
};

}  // namespace macsim
