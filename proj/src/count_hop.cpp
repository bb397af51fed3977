#include "macsim/count_hop.hpp"

#include <algorithm>
#include <bit>

namespace macsim {

namespace {
constexpr StationId kCoordinator = 0;

int bits_for(long long max_value) {
  return std::bit_width(static_cast<unsigned long long>(max_value) + 1ULL);
}
}  // namespace

CountHop::CountHop(int n, Round horizon, long long beta_floor) : n_(n) {
  if (n < 3) throw EngineError(EngineErrorCode::InvalidConfig, 0, "count-hop needs n >= 3");
  width_ = bits_for(horizon + std::max<long long>(1, beta_floor));
  phase_start_ = n + 1;  // rounds 1..n are spent fully off
  next_phase_start_ = 0;
  counts_.assign(static_cast<std::size_t>(n), {});
  duties_.resize(static_cast<std::size_t>(n));
  known_next_start_.assign(static_cast<std::size_t>(n), 0);
}

std::optional<Round> CountHop::first_wake(StationId s) const {
  if (s == kCoordinator) return static_cast<Round>(n_) + 1;
  return static_cast<Round>(n_) + s;
}

long long CountHop::old_count_for(const StationView& view, StationId dest) const {
  long long c = 0;
  for (const auto& q : view.queue())
    if (q.arrival < phase_start_ && q.packet.destination == dest) ++c;
  return c;
}

PacketId CountHop::first_old_packet_for(const StationView& view, StationId dest) const {
  for (const auto& q : view.queue())
    if (q.arrival < phase_start_ && q.packet.destination == dest) return q.packet.id;
  throw EngineError(EngineErrorCode::AlgorithmAssertion, 0,
                    "ScheduleOverrun: a slot was assigned but no packet remains");
}

void CountHop::on_round_start(Round r) {
  if (next_phase_start_ != 0 && r == next_phase_start_) {
    phase_start_ = r;
    next_phase_start_ = 0;
    for (auto& row : counts_) row.clear();
    worker_total_.clear();
    totals_.clear();
    stage_start_.clear();
    offsets_.clear();
    for (auto& d : duties_) d.clear();
  }
}

StationAction CountHop::act(StationId s, Round r, const StationView& view) {
  const Round S = phase_start_;
  if (r < S + (n_ - 1)) {
    // Backlog reports, one worker per round in name order; coordinator listens.
    StationId reporter = static_cast<StationId>(r - S + 1);
    if (s != reporter) return StationAction::listen();
    CountReportControl report;
    report.width = width_;
    for (StationId v = 0; v < n_; ++v) {
      if (v == s) continue;
      report.counts.push_back(old_count_for(view, v));
    }
    return StationAction::send_control(std::move(report));
  }
  if (r < S + 2 * (n_ - 1)) {
    // Offset assignments, coordinator to one worker per round.
    StationId worker = static_cast<StationId>(r - S - (n_ - 1) + 1);
    if (s != kCoordinator) return StationAction::listen();
    OffsetAssignControl assign;
    assign.worker = worker;
    assign.width = width_;
    assign.offsets = offsets_[static_cast<std::size_t>(worker)];
    assign.totals = totals_;
    return StationAction::send_control(std::move(assign));
  }
  // Delivery stages: destination v listens through its stage, the slot owner
  // transmits its oldest remaining packet for v.
  for (StationId v = 0; v < n_; ++v) {
    Round begin = stage_start_[static_cast<std::size_t>(v)];
    Round end = begin + totals_[static_cast<std::size_t>(v)];
    if (r < begin || r >= end) continue;
    if (s == v) return StationAction::listen();
    long long q = r - begin;
    long long from, count;
    if (s == kCoordinator) {
      from = worker_total_[static_cast<std::size_t>(v)];
      count = totals_[static_cast<std::size_t>(v)] - from;
    } else {
      from = offsets_[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
      count = counts_[static_cast<std::size_t>(s)][static_cast<std::size_t>(v)];
    }
    if (q < from || q >= from + count) return StationAction::listen();
    return StationAction::send_packet(first_old_packet_for(view, v));
  }
  return StationAction::listen();
}

Reaction CountHop::observe(StationId s, Round r, const Feedback& fb, const StationView& view) {
  const Round S = phase_start_;

  if (s == kCoordinator && r < S + (n_ - 1)) {
    StationId reporter = static_cast<StationId>(r - S + 1);
    if (fb.kind != FeedbackKind::Heard)
      throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                        "missing backlog report from station " + std::to_string(reporter));
    const auto& report = std::get<CountReportControl>(fb.message->control);
    auto& row = counts_[static_cast<std::size_t>(reporter)];
    row.assign(static_cast<std::size_t>(n_), 0);
    std::size_t idx = 0;
    for (StationId v = 0; v < n_; ++v) {
      if (v == reporter) continue;
      row[static_cast<std::size_t>(v)] = report.counts[idx++];
    }
    if (r == S + (n_ - 2)) {
      // All reports are in: lay out the stages and everyone's intervals.
      worker_total_.assign(static_cast<std::size_t>(n_), 0);
      totals_.assign(static_cast<std::size_t>(n_), 0);
      offsets_.assign(static_cast<std::size_t>(n_),
                      std::vector<long long>(static_cast<std::size_t>(n_), 0));
      for (StationId v = 0; v < n_; ++v) {
        long long acc = 0;
        for (StationId w = 1; w < n_; ++w) {
          if (w == v) continue;
          offsets_[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)] = acc;
          acc += counts_[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)];
        }
        worker_total_[static_cast<std::size_t>(v)] = acc;
        totals_[static_cast<std::size_t>(v)] = acc + old_count_for(view, v);
      }
      stage_start_.assign(static_cast<std::size_t>(n_), 0);
      Round cursor = S + 2 * (n_ - 1);
      for (StationId v = 0; v < n_; ++v) {
        stage_start_[static_cast<std::size_t>(v)] = cursor;
        cursor += totals_[static_cast<std::size_t>(v)];
      }
      next_phase_start_ = cursor;
      known_next_start_[0] = cursor;
      // Coordinator duties: its receive stage plus its own transmit tails.
      auto& duty = duties_[0];
      duty.clear();
      if (totals_[0] > 0) duty.push_back({stage_start_[0], stage_start_[0] + totals_[0]});
      for (StationId v = 1; v < n_; ++v) {
        long long own = totals_[static_cast<std::size_t>(v)] -
                        worker_total_[static_cast<std::size_t>(v)];
        if (own > 0) {
          Round from = stage_start_[static_cast<std::size_t>(v)] +
                       worker_total_[static_cast<std::size_t>(v)];
          duty.push_back({from, from + own});
        }
      }
      std::sort(duty.begin(), duty.end(),
                [](const Interval& a, const Interval& b) { return a.from < b.from; });
    }
  }

  if (s != kCoordinator && r == S + (n_ - 1) + s - 1) {
    if (fb.kind != FeedbackKind::Heard)
      throw EngineError(EngineErrorCode::AlgorithmAssertion, r, "missing offset assignment");
    const auto& assign = std::get<OffsetAssignControl>(fb.message->control);
    Round cursor = S + 2 * (n_ - 1);
    auto& duty = duties_[static_cast<std::size_t>(s)];
    duty.clear();
    for (StationId v = 0; v < n_; ++v) {
      Round begin = cursor;
      cursor += assign.totals[static_cast<std::size_t>(v)];
      if (v == s) {
        if (assign.totals[static_cast<std::size_t>(v)] > 0)
          duty.push_back({begin, begin + assign.totals[static_cast<std::size_t>(v)]});
        continue;
      }
      long long mine = old_count_for(view, v);
      if (mine > 0) {
        Round from = begin + assign.offsets[static_cast<std::size_t>(v)];
        duty.push_back({from, from + mine});
      }
    }
    known_next_start_[static_cast<std::size_t>(s)] = cursor;
    std::sort(duty.begin(), duty.end(),
              [](const Interval& a, const Interval& b) { return a.from < b.from; });
  }

  return next_duty(s, r);
}

Reaction CountHop::next_duty(StationId s, Round r) const {
  const Round S = phase_start_;
  if (s == kCoordinator) {
    // Contiguously on through reports and assignments.
    if (r + 1 < S + 2 * (n_ - 1)) return Reaction::stay_on();
  } else {
    if (r < S + (n_ - 1)) {
      // Between my report and my assignment slot.
      return Reaction::wake_at(S + (n_ - 1) + s - 1);
    }
  }
  for (const auto& duty : duties_[static_cast<std::size_t>(s)]) {
    if (r + 1 >= duty.from && r + 1 < duty.to) return Reaction::stay_on();
    if (duty.from > r) return Reaction::wake_at(duty.from);
  }
  Round next = known_next_start_[static_cast<std::size_t>(s)];
  if (next == 0)
    throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                      "station " + std::to_string(s) + " has no learned phase end");
  return Reaction::wake_at(s == kCoordinator ? next : next + s - 1);
}

}  // namespace macsim
