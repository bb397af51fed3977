#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "macsim/engine.hpp"

namespace macsim {

/// Season-structured direct routing at cap 3. One conductor per season of
/// n-1 rounds transmits every round: the packet scheduled for the slot, the
/// listen-round set it teaches the round's learner, and a heavy-queue toggle.
/// Stations replicate the conductor rotation list purely from what each of
/// them hears in its own learning round; a heavy conductor moves to the list
/// front and keeps conducting while it stays heavy.
class Orchestra : public Algorithm {
 public:
  explicit Orchestra(int n);

  std::string name() const override { return "orchestra"; }
  std::optional<Round> first_wake(StationId s) const override;
  StationAction act(StationId s, Round r, const StationView& view) override;
  Reaction observe(StationId s, Round r, const Feedback& fb,
                   const StationView& view) override;
  void on_injection(StationId s, Round r, const Packet& p) override;
  void on_round_start(Round r) override;

  Round season_of(Round r) const { return (r - 1) / (n_ - 1) + 1; }
  int round_in_season(Round r) const { return static_cast<int>((r - 1) % (n_ - 1)) + 1; }
  Round season_start(Round season) const { return (season - 1) * (n_ - 1) + 1; }

  const std::vector<StationId>& baton_list_of(StationId s) const {
    return stations_[static_cast<std::size_t>(s)].baton_list;
  }
  StationId conductor_of(StationId s) const {
    return stations_[static_cast<std::size_t>(s)].conductor;
  }
  bool station_is_big(StationId s) const {
    return stations_[static_cast<std::size_t>(s)].big_this_season;
  }

 private:
  struct Slot {
    PacketId id;
    StationId dest;
  };
  struct OrchestraStation {
    std::vector<StationId> baton_list;
    StationId conductor = 0;
    bool heard_big = false;
    /// taught[c]: listen rounds for c's next conducting season.
    std::vector<std::vector<int>> taught;
    /// My listen rounds in the current season (snapshot of taught[conductor]
    /// taken at the season start, before this season's teaching overwrites it).
    std::vector<int> season_listen;
    /// Transmittable backlog not yet placed in any schedule, injection order.
    std::deque<std::pair<PacketId, StationId>> old_unscheduled;
    /// Packets injected while conducting; they join the backlog at season end.
    std::vector<std::pair<PacketId, StationId>> new_this_season;
    std::vector<std::optional<Slot>> current_slots;  // delivered this conducting season
    std::vector<std::optional<Slot>> next_slots;     // delivered next conducting season
    bool big_this_season = false;
  };

  StationId successor_of(const std::vector<StationId>& list, StationId c) const;
  int learn_round_of(StationId musician, StationId conductor) const;
  StationId learner_at(StationId conductor, int round_in_season) const;
  Round first_duty_next_season(const OrchestraStation& st, StationId me,
                               Round next_season) const;

  int n_;
  long long big_threshold_;  // n^2 - 1 transmittable packets at a season start
  std::vector<OrchestraStation> stations_;
};

}  // namespace macsim
