#include "macsim/orchestra.hpp"

#include <algorithm>

namespace macsim {

Orchestra::Orchestra(int n) : n_(n) {
  if (n < 3) throw EngineError(EngineErrorCode::InvalidConfig, 0, "orchestra needs n >= 3");
  big_threshold_ = static_cast<long long>(n) * n - 1;
  stations_.resize(static_cast<std::size_t>(n));
  for (auto& st : stations_) {
    st.baton_list.resize(static_cast<std::size_t>(n));
    for (StationId s = 0; s < n; ++s) st.baton_list[static_cast<std::size_t>(s)] = s;
    st.conductor = 0;
    st.taught.resize(static_cast<std::size_t>(n));
    st.current_slots.resize(static_cast<std::size_t>(n - 1));
    st.next_slots.resize(static_cast<std::size_t>(n - 1));
  }
}

StationId Orchestra::successor_of(const std::vector<StationId>& list, StationId c) const {
  auto it = std::find(list.begin(), list.end(), c);
  std::size_t pos = static_cast<std::size_t>(it - list.begin());
  return list[(pos + 1) % list.size()];
}

int Orchestra::learn_round_of(StationId musician, StationId conductor) const {
  // Musicians learn one by one in name order, one round each.
  int rank = 0;
  for (StationId s = 0; s < n_; ++s) {
    if (s == conductor) continue;
    ++rank;
    if (s == musician) return rank;
  }
  return -1;
}

StationId Orchestra::learner_at(StationId conductor, int round_in_season) const {
  int rank = 0;
  for (StationId s = 0; s < n_; ++s) {
    if (s == conductor) continue;
    if (++rank == round_in_season) return s;
  }
  return -1;
}

Round Orchestra::first_duty_next_season(const OrchestraStation& st, StationId me,
                                        Round next_season) const {
  StationId next_conductor = st.heard_big ? st.conductor
                                          : successor_of(st.baton_list, st.conductor);
  if (me == next_conductor) return season_start(next_season);
  int first = learn_round_of(me, next_conductor);
  for (int d : st.taught[static_cast<std::size_t>(next_conductor)])
    first = std::min(first, d);
  return season_start(next_season) + first - 1;
}

void Orchestra::on_round_start(Round r) {
  if (round_in_season(r) != 1) return;
  if (r == 1) {
    // First season: conductor 0 schedules from an empty backlog.
    auto& st = stations_[0];
    st.big_this_season = false;
    st.heard_big = false;
    return;
  }
  for (StationId s = 0; s < n_; ++s) {
    auto& st = stations_[static_cast<std::size_t>(s)];
    StationId ended = st.conductor;
    bool big = st.heard_big;
    StationId next;
    if (big) {
      auto it = std::find(st.baton_list.begin(), st.baton_list.end(), ended);
      st.baton_list.erase(it);
      st.baton_list.insert(st.baton_list.begin(), ended);
      next = ended;
    } else {
      next = successor_of(st.baton_list, ended);
    }
    st.conductor = next;
    st.heard_big = false;
    // The set taught during the ended season only applies when that conductor
    // conducts again, so the current-season copy is refreshed here.
    st.season_listen =
        (s == next) ? std::vector<int>{} : st.taught[static_cast<std::size_t>(next)];

    if (s == ended) {
      for (auto& p : st.new_this_season) st.old_unscheduled.push_back(p);
      st.new_this_season.clear();
    }
    if (s == next) {
      long long scheduled_waiting = 0;
      for (const auto& slot : st.next_slots)
        if (slot) ++scheduled_waiting;
      long long old_in_queue =
          static_cast<long long>(st.old_unscheduled.size()) + scheduled_waiting;
      st.big_this_season = old_in_queue >= big_threshold_;
      st.heard_big = st.big_this_season;
      st.current_slots = std::move(st.next_slots);
      st.next_slots.assign(static_cast<std::size_t>(n_ - 1), std::nullopt);
      for (int j = 0; j < n_ - 1 && !st.old_unscheduled.empty(); ++j) {
        auto [id, dest] = st.old_unscheduled.front();
        st.old_unscheduled.pop_front();
        st.next_slots[static_cast<std::size_t>(j)] = Slot{id, dest};
      }
    }
  }
  // Replicated-state fidelity check: every station derived the same rotation.
  for (StationId s = 1; s < n_; ++s) {
    if (stations_[static_cast<std::size_t>(s)].baton_list != stations_[0].baton_list ||
        stations_[static_cast<std::size_t>(s)].conductor != stations_[0].conductor)
      throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                        "InconsistentLists: station " + std::to_string(s) +
                            " diverged from station 0 at a season start");
  }
}

std::optional<Round> Orchestra::first_wake(StationId s) const {
  if (s == 0) return 1;
  return static_cast<Round>(learn_round_of(s, 0));
}

StationAction Orchestra::act(StationId s, Round r, const StationView&) {
  auto& st = stations_[static_cast<std::size_t>(s)];
  if (s != st.conductor) return StationAction::listen();
  int rin = round_in_season(r);
  StationId learner = learner_at(s, rin);
  TeachControl teach;
  teach.learner = learner;
  teach.big = st.big_this_season;
  teach.station_count = n_;
  for (int j = 0; j < n_ - 1; ++j) {
    const auto& slot = st.next_slots[static_cast<std::size_t>(j)];
    if (slot && slot->dest == learner) teach.listen_rounds.push_back(j + 1);
  }
  StationAction a;
  a.mode = Mode::Transmit;
  a.control = std::move(teach);
  const auto& slot = st.current_slots[static_cast<std::size_t>(rin - 1)];
  if (slot) a.transmit_packet = slot->id;
  return a;
}

Reaction Orchestra::observe(StationId s, Round r, const Feedback& fb, const StationView&) {
  auto& st = stations_[static_cast<std::size_t>(s)];
  const int rin = round_in_season(r);
  const Round season = season_of(r);

  if (s == st.conductor) {
    if (rin < n_ - 1 || st.big_this_season) return Reaction::stay_on();
    return Reaction::wake_at(first_duty_next_season(st, s, season + 1));
  }

  if (rin == learn_round_of(s, st.conductor)) {
    if (fb.kind != FeedbackKind::Heard)
      throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                        "learner heard nothing from the conductor");
    const auto& teach = std::get<TeachControl>(fb.message->control);
    st.taught[static_cast<std::size_t>(st.conductor)] = teach.listen_rounds;
    st.heard_big = teach.big;
  }

  // Remaining duties this season: my learning round and my taught listen
  // rounds; afterwards jump straight to the first duty of the next season.
  int next_duty = n_;  // sentinel past the season
  int learn = learn_round_of(s, st.conductor);
  if (learn > rin) next_duty = std::min(next_duty, learn);
  for (int d : st.season_listen)
    if (d > rin) next_duty = std::min(next_duty, d);
  if (next_duty < n_) return Reaction::wake_at(season_start(season) + next_duty - 1);
  return Reaction::wake_at(first_duty_next_season(st, s, season + 1));
}

void Orchestra::on_injection(StationId s, Round, const Packet& p) {
  auto& st = stations_[static_cast<std::size_t>(s)];
  if (s == st.conductor)
    st.new_this_season.emplace_back(p.id, p.destination);
  else
    st.old_unscheduled.emplace_back(p.id, p.destination);
}

}  // namespace macsim
