#include "macsim/k_clique.hpp"

#include <algorithm>

namespace macsim {

PairLayout PairLayout::build(int n, int k) {
  if (n < 3) throw EngineError(EngineErrorCode::InvalidConfig, 0, "k-clique needs n >= 3");
  // Largest even k' <= min(k, 2n/3) dividing 2n.
  int limit = std::min(k, (2 * n) / 3);
  int ek = 0;
  for (int c = limit - (limit % 2); c >= 2; c -= 2)
    if ((2 * n) % c == 0) {
      ek = c;
      break;
    }
  if (ek < 2)
    throw EngineError(EngineErrorCode::InvalidConfig, 0,
                      "no feasible even cap divides 2n for k-clique");
  PairLayout layout;
  layout.n = n;
  layout.requested_k = k;
  layout.effective_k = ek;
  layout.set_size = ek / 2;
  layout.set_count = 2 * n / ek;
  for (int a = 0; a < layout.set_count; ++a)
    for (int b = a + 1; b < layout.set_count; ++b) layout.pairs.emplace_back(a, b);
  layout.pairs_of.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < layout.pair_count(); ++p) {
    auto [a, b] = layout.pairs[static_cast<std::size_t>(p)];
    for (int i = 0; i < layout.set_size; ++i) {
      layout.pairs_of[static_cast<std::size_t>(a * layout.set_size + i)].push_back(p);
      layout.pairs_of[static_cast<std::size_t>(b * layout.set_size + i)].push_back(p);
    }
  }
  return layout;
}

std::vector<StationId> PairLayout::members_of(int pair_index) const {
  auto [a, b] = pairs[static_cast<std::size_t>(pair_index)];
  std::vector<StationId> m;
  m.reserve(static_cast<std::size_t>(effective_k));
  for (int i = 0; i < set_size; ++i) m.push_back(a * set_size + i);
  for (int i = 0; i < set_size; ++i) m.push_back(b * set_size + i);
  return m;
}

bool PairLayout::station_in_pair(StationId s, int pair_index) const {
  auto [a, b] = pairs[static_cast<std::size_t>(pair_index)];
  int set = set_of(s);
  return set == a || set == b;
}

Round PairLayout::next_active_round(StationId s, Round r) const {
  const int count = pair_count();
  int current = active_pair(r);
  Round best = -1;
  for (int p : pairs_of[static_cast<std::size_t>(s)]) {
    Round gap = (p - current + count) % count;
    if (gap == 0) gap = count;
    Round candidate = r + gap;
    if (best < 0 || candidate < best) best = candidate;
  }
  return best;
}

KClique::KClique(int n, int k) : layout_(PairLayout::build(n, k)) {
  members_.reserve(static_cast<std::size_t>(layout_.pair_count()));
  for (int p = 0; p < layout_.pair_count(); ++p) members_.push_back(layout_.members_of(p));
  pair_states_.resize(static_cast<std::size_t>(layout_.pair_count()));
}

std::optional<Round> KClique::first_wake(StationId s) const {
  Round best = -1;
  for (int p : layout_.pairs_of[static_cast<std::size_t>(s)]) {
    Round candidate = p + 1;
    if (best < 0 || candidate < best) best = candidate;
  }
  return best;
}

StationAction KClique::act(StationId s, Round r, const StationView& view) {
  const int p = layout_.active_pair(r);
  const auto& st = pair_states_[static_cast<std::size_t>(p)];
  const auto& members = members_[static_cast<std::size_t>(p)];
  if (members[static_cast<std::size_t>(st.holder_idx)] != s) return StationAction::listen();
  for (const auto& q : view.queue()) {
    if (q.arrival >= st.phase_start) continue;
    if (layout_.station_in_pair(q.packet.destination, p))
      return StationAction::send_packet(q.packet.id);
  }
  return StationAction::listen();
}

Reaction KClique::observe(StationId s, Round r, const Feedback& fb, const StationView&) {
  const int p = layout_.active_pair(r);
  auto& st = pair_states_[static_cast<std::size_t>(p)];
  if (st.updated_at != r) {
    st.updated_at = r;
    if (fb.kind == FeedbackKind::Silent) {
      st.holder_idx =
          (st.holder_idx + 1) % static_cast<int>(members_[static_cast<std::size_t>(p)].size());
      if (st.holder_idx == 0) st.phase_start = r + 1;
    }
  }
  Reaction re;
  re.next_on = layout_.next_active_round(s, r);
  return re;
}

ObliviousSchedule extract_schedule(const PairLayout& layout, Round horizon) {
  ObliviousSchedule sched;
  sched.n = layout.n;
  sched.cap = layout.effective_k;
  sched.max_on_observed = layout.effective_k;
  sched.horizon = horizon;
  sched.on_mask.resize(static_cast<std::size_t>(horizon), 0);
  std::vector<std::uint64_t> pair_masks(static_cast<std::size_t>(layout.pair_count()), 0);
  for (int p = 0; p < layout.pair_count(); ++p)
    for (StationId s : layout.members_of(p))
      pair_masks[static_cast<std::size_t>(p)] |= (1ULL << s);
  for (Round r = 1; r <= horizon; ++r)
    sched.on_mask[static_cast<std::size_t>(r - 1)] =
        pair_masks[static_cast<std::size_t>(layout.active_pair(r))];
  return sched;
}

}  // namespace macsim
