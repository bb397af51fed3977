#include "macsim/k_cycle.hpp"

#include <algorithm>

namespace macsim {

GroupLayout GroupLayout::build(int n, int k) {
  if (n < 3) throw EngineError(EngineErrorCode::InvalidConfig, 0, "k-cycle needs n >= 3");
  if (k < 2) throw EngineError(EngineErrorCode::InvalidConfig, 0, "k-cycle needs k >= 2");
  GroupLayout layout;
  layout.n = n;
  layout.requested_k = k;
  // Keep fewer stations on when groups would cover most of the system.
  int ek = std::min(k, (n + 1) / 2);
  layout.effective_k = ek;
  layout.delta = (4LL * (n - 1) * ek + (n - ek) - 1) / (n - ek);

  const int stride = ek - 1;
  int linear_groups = (n - 1 + stride - 1) / stride;
  for (int i = 0; i < linear_groups; ++i) {
    std::vector<StationId> g;
    for (int s = i * stride; s <= std::min(i * stride + ek - 1, n - 1); ++s)
      g.push_back(s);
    layout.groups.push_back(std::move(g));
  }
  // Station 0 closes the cycle as a member of the last group. If the tail
  // group already holds k stations it joins as an extra; otherwise it takes a
  // free slot and any remaining slots stay dummy.
  auto& last = layout.groups.back();
  int tail_real = static_cast<int>(last.size());
  last.push_back(0);
  std::sort(last.begin(), last.end());
  layout.dummies_in_last = std::max(0, ek - tail_real - 1);
  layout.max_on = std::max(ek, tail_real + 1);

  // Adjacent groups share the station at the stride boundary; the last group
  // hands packets back to the first through station 0.
  const int count = static_cast<int>(layout.groups.size());
  layout.outbound_connector.resize(static_cast<std::size_t>(count));
  for (int i = 0; i + 1 < count; ++i)
    layout.outbound_connector[static_cast<std::size_t>(i)] =
        static_cast<StationId>((i + 1) * stride);
  layout.outbound_connector[static_cast<std::size_t>(count - 1)] = 0;

  layout.groups_of.resize(static_cast<std::size_t>(n));
  for (int g = 0; g < count; ++g)
    for (StationId s : layout.groups[static_cast<std::size_t>(g)])
      layout.groups_of[static_cast<std::size_t>(s)].push_back(g);
  return layout;
}

bool GroupLayout::in_group(StationId s, int g) const {
  const auto& members = groups[static_cast<std::size_t>(g)];
  return std::binary_search(members.begin(), members.end(), s);
}

Round GroupLayout::next_active_round(StationId s, Round r) const {
  const int count = group_count();
  Round current_segment = (r - 1) / delta;  // 0-based
  Round best = -1;
  for (int g : groups_of[static_cast<std::size_t>(s)]) {
    // Smallest segment index > current with index % count == g.
    Round offset = (g - (current_segment + 1) % count + count) % count;
    Round seg = current_segment + 1 + offset;
    Round start = seg * delta + 1;
    if (best < 0 || start < best) best = start;
  }
  return best;
}

KCycle::KCycle(int n, int k) : layout_(GroupLayout::build(n, k)) {
  group_states_.resize(static_cast<std::size_t>(layout_.group_count()));
}

std::optional<Round> KCycle::first_wake(StationId s) const {
  Round best = -1;
  for (int g : layout_.groups_of[static_cast<std::size_t>(s)]) {
    Round start = static_cast<Round>(g) * layout_.delta + 1;
    if (best < 0 || start < best) best = start;
  }
  return best;
}

bool KCycle::eligible(StationId holder, int g, const QueuedPacket& q, Round r) const {
  (void)r;
  if (q.arrival >= group_states_[static_cast<std::size_t>(g)].phase_start) return false;
  if (layout_.in_group(q.packet.destination, g)) return true;
  // Packets bound outside the group ride through the outbound connector; the
  // connector itself holds them for the next group's segment.
  return holder != layout_.outbound_connector[static_cast<std::size_t>(g)];
}

StationAction KCycle::act(StationId s, Round r, const StationView& view) {
  const int g = layout_.active_group(r);
  const auto& members = layout_.groups[static_cast<std::size_t>(g)];
  const auto& st = group_states_[static_cast<std::size_t>(g)];
  if (members[static_cast<std::size_t>(st.holder_idx)] != s) return StationAction::listen();
  for (const auto& q : view.queue())
    if (eligible(s, g, q, r)) return StationAction::send_packet(q.packet.id);
  return StationAction::listen();
}

Reaction KCycle::observe(StationId s, Round r, const Feedback& fb, const StationView&) {
  const int g = layout_.active_group(r);
  auto& st = group_states_[static_cast<std::size_t>(g)];
  const auto& members = layout_.groups[static_cast<std::size_t>(g)];

  // Shared token state advances once per round; every member sees the same
  // feedback, so the replicated copies cannot diverge.
  if (st.updated_at != r) {
    st.updated_at = r;
    if (fb.kind == FeedbackKind::Silent) {
      st.holder_idx = (st.holder_idx + 1) % static_cast<int>(members.size());
      if (st.holder_idx == 0) st.phase_start = r + 1;
    }
  }

  Reaction re;
  if (fb.kind == FeedbackKind::Heard && fb.message->packet &&
      !layout_.in_group(fb.message->packet->destination, g)) {
    re.adopt = (s == layout_.outbound_connector[static_cast<std::size_t>(g)]);
  }

  if (r == layout_.segment_end(r))
    re.next_on = layout_.next_active_round(s, r);
  return re;
}

ObliviousSchedule extract_schedule(const GroupLayout& layout, Round horizon) {
  ObliviousSchedule sched;
  sched.n = layout.n;
  sched.cap = layout.effective_k;
  sched.horizon = horizon;
  sched.on_mask.resize(static_cast<std::size_t>(horizon), 0);
  int max_on = 0;
  for (Round r = 1; r <= horizon; ++r) {
    const auto& members = layout.groups[static_cast<std::size_t>(layout.active_group(r))];
    std::uint64_t mask = 0;
    for (StationId s : members) mask |= (1ULL << s);
    sched.on_mask[static_cast<std::size_t>(r - 1)] = mask;
    max_on = std::max(max_on, static_cast<int>(members.size()));
  }
  sched.max_on_observed = max_on;
  return sched;
}

}  // namespace macsim
