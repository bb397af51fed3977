#include "macsim/adjust_window.hpp"

#include <algorithm>
#include <bit>

namespace macsim {

int AdjustWindow::lg(long long x) {
  return static_cast<int>(std::bit_width(static_cast<unsigned long long>(x)));
}

long long AdjustWindow::initial_window_length(int n) {
  // Smallest L whose bookkeeping stages leave at least half the window to the
  // Main stage: L - 9 n^3 lg(L) >= L / 2.
  const long long n3 = 18LL * n * n * n;
  for (long long L = 1;; ++L) {
    if (L >= n3 * lg(L)) return L;
  }
}

std::vector<bool> AdjustWindow::code_bits(long long value, int width) {
  std::vector<bool> bits(static_cast<std::size_t>(width));
  for (int b = 0; b < width; ++b)
    bits[static_cast<std::size_t>(b)] = (value >> (width - 1 - b)) & 1;
  return bits;
}

long long AdjustWindow::decode_bits(const std::vector<bool>& bits) {
  long long v = 0;
  for (bool b : bits) v = (v << 1) | (b ? 1 : 0);
  return v;
}

AdjustWindow::Calendar AdjustWindow::make_calendar(int n, long long L, Round start) {
  Calendar c;
  c.start = start;
  c.L = L;
  c.lgL = lg(L);
  c.phase_len = 2 + 3LL * c.lgL;
  c.gossip_len = static_cast<Round>(n) * n * c.phase_len;
  c.aux_phases = 8LL * n * c.lgL;
  c.aux_len = static_cast<Round>(n) * n * c.aux_phases;
  c.main_len = L - c.gossip_len - c.aux_len;
  c.large_threshold = 4LL * n * c.lgL;
  if (c.main_len <= 0)
    throw EngineError(EngineErrorCode::AlgorithmAssertion, start,
                      "window too short for its bookkeeping stages");
  return c;
}

AdjustWindow::AdjustWindow(int n) : n_(n) {
  if (n < 3)
    throw EngineError(EngineErrorCode::InvalidConfig, 0, "adjust-window needs n >= 3");
  win_ = make_calendar(n_, initial_window_length(n_), 1);
  stations_.resize(static_cast<std::size_t>(n));
  for (auto& st : stations_) st.records.resize(static_cast<std::size_t>(n));
  aux_positions_.resize(static_cast<std::size_t>(n));
  for (StationId s = 0; s < n; ++s) {
    auto& pos = aux_positions_[static_cast<std::size_t>(s)];
    for (StationId other = 0; other < n; ++other) {
      if (other == s) continue;
      pos.push_back(s * n + other);  // I transmit to `other`
      pos.push_back(other * n + s);  // I listen to `other`
    }
    std::sort(pos.begin(), pos.end());
  }
  snapshot_all(1);
}

void AdjustWindow::snapshot_all(Round) {
  for (auto& st : stations_) {
    const long long size = static_cast<long long>(st.mirror.size());
    st.large = size >= win_.large_threshold;
    st.exceeds = size > win_.L;
    st.q_capped = std::min(size, win_.L);
    // Everything queued at a window start counts as old.
    st.count_to.assign(static_cast<std::size_t>(n_), 0);
    for (const auto& e : st.mirror) ++st.count_to[static_cast<std::size_t>(e.dest)];
    st.count_below.assign(static_cast<std::size_t>(n_), 0);
    long long below = 0;
    for (StationId d = 0; d < n_; ++d) {
      st.count_below[static_cast<std::size_t>(d)] = std::min(below, win_.L);
      below += st.count_to[static_cast<std::size_t>(d)];
      st.count_to[static_cast<std::size_t>(d)] =
          std::min(st.count_to[static_cast<std::size_t>(d)], win_.L);
    }
    st.main_block.clear();
    if (st.large) {
      std::vector<std::pair<StationId, PacketId>> order;
      order.reserve(st.mirror.size());
      for (const auto& e : st.mirror) order.emplace_back(e.dest, e.id);
      std::stable_sort(order.begin(), order.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [dest, id] : order) st.main_block.push_back(id);
    }
    for (auto& rec : st.records) rec = GossipRecord{};
    st.rx_bits.clear();
    st.adopted_this_window.clear();
    st.main_ready = false;
    st.main_duties.clear();
    st.block_start = 0;
  }
}

bool AdjustWindow::decide_double(const AwStation& st) const {
  bool any_exceeds = st.exceeds;
  long long total = st.large ? st.q_capped : 0;
  for (StationId i = 0; i < n_; ++i) {
    const auto& rec = st.records[static_cast<std::size_t>(i)];
    if (!rec.large) continue;
    any_exceeds = any_exceeds || rec.exceeds;
    total += rec.q;
  }
  return any_exceeds || total > win_.main_len;
}

void AdjustWindow::on_round_start(Round r) {
  if (r != win_.start + win_.L) return;
  // Window boundary: every station derives the same doubling verdict from its
  // own gossip records.
  bool verdict = decide_double(stations_[0]);
  for (StationId s = 1; s < n_; ++s)
    if (decide_double(stations_[static_cast<std::size_t>(s)]) != verdict)
      throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                        "stations disagree on the window-doubling verdict");
  long long next_L = verdict ? 2 * win_.L : win_.L;
  if (verdict) ++doublings_;
  win_ = make_calendar(n_, next_L, r);
  snapshot_all(r);
}

std::optional<Round> AdjustWindow::first_wake(StationId s) const {
  return win_.start + pessimistic_entry_offset(s, win_.phase_len);
}

Round AdjustWindow::pessimistic_entry_offset(StationId s, Round phase_len) const {
  // First conceivable duty of a window: the earliest phase in which s could
  // have to listen or, were it large, transmit. Largeness at the next window
  // start is unknown when this is computed, so the earlier of the two is used.
  long long listen_phase = (s == 0) ? n_ : s;       // phase (1,0) or (0,s)
  long long send_phase = (s == 0) ? 1 : static_cast<long long>(s) * n_;  // (0,1) or (s,0)
  return std::min(listen_phase, send_phase) * phase_len;
}

void AdjustWindow::decode_gossip(Round offset, int& i, int& j, int& psi) const {
  long long phase = offset / win_.phase_len;
  i = static_cast<int>(phase / n_);
  j = static_cast<int>(phase % n_);
  psi = static_cast<int>(offset % win_.phase_len);
}

std::optional<StationId> AdjustWindow::dedicated_station(const AwStation& st) const {
  // Smallest station whose queue topped L, from this station's viewpoint. Its
  // own flag stands in for the record it never gossips to itself.
  const AwStation* self = &st;
  for (StationId i = 0; i < n_; ++i) {
    bool exceeds = (self == &stations_[static_cast<std::size_t>(i)])
                       ? st.exceeds
                       : st.records[static_cast<std::size_t>(i)].exceeds;
    if (exceeds) return i;
  }
  return std::nullopt;
}

long long AdjustWindow::coded_value(const AwStation& st, StationId j, int which) const {
  switch (which) {
    case 0: return st.q_capped;
    case 1: return st.count_to[static_cast<std::size_t>(j)];
    default: return st.count_below[static_cast<std::size_t>(j)];
  }
}

std::optional<PacketId> AdjustWindow::spend_packet(const AwStation& st,
                                                   StationId prefer) const {
  for (const auto& e : st.mirror)
    if (e.dest == prefer) return e.id;
  if (st.mirror.empty()) return std::nullopt;
  return st.mirror.front().id;
}

std::optional<PacketId> AdjustWindow::aux_packet(const AwStation& st, StationId dest) const {
  for (const auto& e : st.mirror) {
    if (e.dest != dest) continue;
    if (st.adopted_this_window.count(e.id)) return e.id;
    if (!st.large && e.arrival < win_.start) return e.id;
  }
  return std::nullopt;
}

std::vector<std::pair<long long, long long>> AdjustWindow::main_listen_intervals(
    const std::vector<SourceSummary>& sources, long long main_len) {
  std::vector<std::pair<long long, long long>> intervals;
  long long cursor = 0;
  for (const auto& src : sources) {
    if (!src.large) continue;
    if (src.to_me > 0) {
      long long from = std::max<long long>(cursor + src.below_me, 0);
      long long to = std::min(cursor + src.below_me + src.to_me, main_len);
      if (from < to) intervals.emplace_back(from, to);
    }
    cursor += src.q;
  }
  return intervals;
}

void AdjustWindow::ensure_main_plan(StationId s) {
  auto& st = stations_[static_cast<std::size_t>(s)];
  if (st.main_ready) return;
  st.main_ready = true;
  st.main_duties.clear();
  if (dedicated_station(st)) return;  // handled positionally, no intervals
  // Blocks cover all large stations including me; my own entry carries no
  // listen slots (nothing is ever addressed to its own holder).
  std::vector<SourceSummary> sources(static_cast<std::size_t>(n_));
  long long cursor = 0;
  st.block_start = -1;
  for (StationId i = 0; i < n_; ++i) {
    auto& src = sources[static_cast<std::size_t>(i)];
    if (i == s) {
      src.large = st.large;
      src.q = st.q_capped;
      if (st.large) st.block_start = cursor;
    } else {
      const auto& rec = st.records[static_cast<std::size_t>(i)];
      src.large = rec.large;
      src.q = rec.q;
      src.to_me = rec.to_me;
      src.below_me = rec.below_me;
    }
    if (src.large) cursor += src.q;
  }
  for (auto [from, to] : main_listen_intervals(sources, win_.main_len))
    st.main_duties.emplace_back(win_.gossip_len + from, win_.gossip_len + to);
  if (st.large && st.block_start >= 0) {
    long long from = st.block_start;
    long long to = std::min(st.block_start + st.q_capped, win_.main_len);
    if (from < to) st.main_duties.emplace_back(win_.gossip_len + from, win_.gossip_len + to);
  }
  std::sort(st.main_duties.begin(), st.main_duties.end());
}

StationAction AdjustWindow::act(StationId s, Round r, const StationView& view) {
  auto& st = stations_[static_cast<std::size_t>(s)];
  if (st.mirror.size() != view.size())
    throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                      "queue mirror out of step at station " + std::to_string(s));
  const Round offset = r - win_.start;

  if (in_gossip(offset)) {
    int i, j, psi;
    decode_gossip(offset, i, j, psi);
    if (i == j || s != i || !st.large) return StationAction::listen();
    bool send;
    if (psi == 0)
      send = true;
    else if (psi == 1)
      send = st.exceeds;
    else {
      int b = psi - 2;
      long long value = coded_value(st, j, b / win_.lgL);
      send = (value >> (win_.lgL - 1 - b % win_.lgL)) & 1;
    }
    if (!send) return StationAction::listen();
    auto id = spend_packet(st, j);
    if (!id)
      throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                        "QueueUnderflow: large station " + std::to_string(s) +
                            " ran dry during coded transfer");
    return StationAction::send_packet(*id);
  }

  if (in_main(offset)) {
    ensure_main_plan(s);
    const long long q = offset - win_.gossip_len;
    if (auto dedicated = dedicated_station(st)) {
      if (s != *dedicated) return StationAction::listen();
      StationId listener = static_cast<StationId>(q % (n_ - 1));
      if (listener >= *dedicated) ++listener;
      for (const auto& e : st.mirror)
        if (e.dest == listener && e.arrival < win_.start)
          return StationAction::send_packet(e.id);
      return StationAction::listen();
    }
    if (st.large && q >= st.block_start &&
        q < st.block_start + static_cast<long long>(st.main_block.size())) {
      PacketId id = st.main_block[static_cast<std::size_t>(q - st.block_start)];
      for (const auto& e : st.mirror)
        if (e.id == id) return StationAction::send_packet(id);
      // Spent during gossip; its receiver hears silence in this slot.
    }
    return StationAction::listen();
  }

  // Auxiliary.
  const long long a = offset - win_.gossip_len - win_.main_len;
  const int pos = static_cast<int>(a % (static_cast<long long>(n_) * n_));
  const int i = pos / n_;
  const int j = pos % n_;
  if (i != j && s == i) {
    if (auto id = aux_packet(st, j)) return StationAction::send_packet(*id);
  }
  return StationAction::listen();
}

Reaction AdjustWindow::observe(StationId s, Round r, const Feedback& fb,
                               const StationView&) {
  auto& st = stations_[static_cast<std::size_t>(s)];
  const Round offset = r - win_.start;
  bool adopt = false;

  // Own transmission heard: in every stage the packet is either consumed by
  // its destination or adopted by the listening station, so it left my queue.
  if (fb.kind == FeedbackKind::Heard && fb.message->sender == s && fb.message->packet) {
    PacketId id = fb.message->packet->id;
    auto it = std::find_if(st.mirror.begin(), st.mirror.end(),
                           [&](const MirrorEntry& e) { return e.id == id; });
    if (it != st.mirror.end()) st.mirror.erase(it);
  }

  if (in_gossip(offset)) {
    int i, j, psi;
    decode_gossip(offset, i, j, psi);
    if (s == j && i != j) {
      auto& rec = st.records[static_cast<std::size_t>(i)];
      bool heard = fb.kind == FeedbackKind::Heard;
      if (psi == 0) {
        rec.large = heard;
        st.rx_bits.clear();
      } else if (psi == 1) {
        rec.exceeds = heard;
      } else if (rec.large) {
        st.rx_bits.push_back(heard);
        if (psi == win_.phase_len - 1) {
          std::vector<bool> number(st.rx_bits.begin(), st.rx_bits.begin() + win_.lgL);
          rec.q = decode_bits(number);
          number.assign(st.rx_bits.begin() + win_.lgL, st.rx_bits.begin() + 2 * win_.lgL);
          rec.to_me = decode_bits(number);
          number.assign(st.rx_bits.begin() + 2 * win_.lgL, st.rx_bits.end());
          rec.below_me = decode_bits(number);
        }
      }
      if (heard && fb.message->packet && fb.message->packet->destination != s) {
        adopt = true;
        st.mirror.push_back(MirrorEntry{fb.message->packet->id,
                                        fb.message->packet->destination, r});
        st.adopted_this_window.insert(fb.message->packet->id);
      }
    }
  }

  Reaction re;
  re.adopt = adopt;
  re.next_on = next_duty_round(s, r);
  return re;
}

void AdjustWindow::on_injection(StationId s, Round r, const Packet& p) {
  stations_[static_cast<std::size_t>(s)].mirror.push_back(
      MirrorEntry{p.id, p.destination, r});
}

Round AdjustWindow::next_duty_round(StationId s, Round r) {
  auto& st = stations_[static_cast<std::size_t>(s)];
  Round offset = r - win_.start + 1;

  if (offset < win_.gossip_len) {
    long long phase = offset / win_.phase_len;
    for (; phase < static_cast<long long>(n_) * n_; ++phase) {
      int i = static_cast<int>(phase / n_);
      int j = static_cast<int>(phase % n_);
      if (i == j) continue;
      bool mine = (j == s) || (i == s && st.large);
      if (!mine) continue;
      Round begin = phase * win_.phase_len;
      return win_.start + std::max(offset, begin);
    }
    offset = win_.gossip_len;
  }

  if (offset < win_.gossip_len + win_.main_len) {
    ensure_main_plan(s);
    if (auto dedicated = dedicated_station(st)) {
      if (s == *dedicated) return win_.start + offset;
      // Listener rotation: my slots repeat every n-1 main rounds.
      long long q = offset - win_.gossip_len;
      long long my_index = s - (s > *dedicated ? 1 : 0);
      long long delta = (my_index - q % (n_ - 1) + (n_ - 1)) % (n_ - 1);
      if (q + delta < win_.main_len) return win_.start + offset + delta;
    } else {
      for (const auto& [from, to] : st.main_duties) {
        if (offset < to && offset >= from) return win_.start + offset;
        if (from > offset) return win_.start + from;
      }
    }
    offset = win_.gossip_len + win_.main_len;
  }

  if (offset < win_.L) {
    long long a = offset - win_.gossip_len - win_.main_len;
    const long long phase_size = static_cast<long long>(n_) * n_;
    long long phase = a / phase_size;
    int pos = static_cast<int>(a % phase_size);
    const auto& duty = aux_positions_[static_cast<std::size_t>(s)];
    while (phase < win_.aux_phases) {
      auto it = std::lower_bound(duty.begin(), duty.end(), pos);
      if (it != duty.end())
        return win_.start + win_.gossip_len + win_.main_len + phase * phase_size + *it;
      ++phase;
      pos = 0;
    }
  }

  // Next window: its length (and with it the first duty's offset) follows
  // from the doubling verdict this station can already compute.
  long long next_L = decide_double(st) ? 2 * win_.L : win_.L;
  Round next_phase_len = 2 + 3LL * lg(next_L);
  return win_.start + win_.L + pessimistic_entry_offset(s, next_phase_len);
}

}  // namespace macsim
