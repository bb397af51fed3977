#include "macsim/k_subsets.hpp"

#include <algorithm>
#include <cstdlib>

namespace macsim {

namespace {

long long binomial_capped(int n, int k, long long cap) {
  if (k < 0 || k > n) return 0;
  long long result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > cap) return cap + 1;
  }
  return result;
}

long long gamma_limit() {
  if (const char* env = std::getenv("MACSIM_MAX_GAMMA")) {
    long long v = std::atoll(env);
    if (v > 0) return v;
  }
  return 10000;
}

}  // namespace

ThreadLayout ThreadLayout::build(int n, int k) {
  if (n < 3 || k < 2 || k >= n)
    throw EngineError(EngineErrorCode::InvalidConfig, 0, "k-subsets needs 2 <= k < n");
  const long long limit = gamma_limit();
  long long gamma = binomial_capped(n, k, limit);
  if (gamma > limit)
    throw EngineError(EngineErrorCode::InvalidConfig, 0,
                      "C(n,k) exceeds the thread ceiling of " + std::to_string(limit));
  ThreadLayout layout;
  layout.n = n;
  layout.k = k;
  layout.gamma = gamma;
  // Lexicographic enumeration of k-subsets.
  std::vector<StationId> current(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) current[static_cast<std::size_t>(i)] = i;
  while (true) {
    layout.subsets.push_back(current);
    int i = k - 1;
    while (i >= 0 && current[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++current[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      current[static_cast<std::size_t>(j)] = current[static_cast<std::size_t>(j - 1)] + 1;
  }
  layout.threads_of.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < static_cast<int>(layout.subsets.size()); ++t)
    for (StationId s : layout.subsets[static_cast<std::size_t>(t)])
      layout.threads_of[static_cast<std::size_t>(s)].push_back(t);
  layout.eligible_pairs.resize(static_cast<std::size_t>(n) * n);
  for (int t = 0; t < static_cast<int>(layout.subsets.size()); ++t)
    for (StationId v : layout.subsets[static_cast<std::size_t>(t)])
      for (StationId w : layout.subsets[static_cast<std::size_t>(t)])
        if (v != w)
          layout.eligible_pairs[static_cast<std::size_t>(v) * n + w].push_back(t);
  return layout;
}

Round ThreadLayout::next_thread_round(StationId s, Round r) const {
  int current = thread_of(r);
  Round best = -1;
  for (int t : threads_of[static_cast<std::size_t>(s)]) {
    Round gap = (t - current + gamma) % gamma;
    if (gap == 0) gap = gamma;
    Round candidate = r + gap;
    if (best < 0 || candidate < best) best = candidate;
  }
  return best;
}

KSubsets::KSubsets(int n, int k, int big_threshold, bool use_rrw)
    : layout_(ThreadLayout::build(n, k)),
      big_threshold_(big_threshold > 0 ? big_threshold : k),
      use_rrw_(use_rrw) {
  stations_.resize(static_cast<std::size_t>(n));
  threads_.resize(static_cast<std::size_t>(layout_.gamma));
  for (long long t = 0; t < layout_.gamma; ++t)
    threads_[static_cast<std::size_t>(t)].list = layout_.subsets[static_cast<std::size_t>(t)];
}

std::optional<Round> KSubsets::first_wake(StationId s) const {
  const auto& threads = layout_.threads_of[static_cast<std::size_t>(s)];
  if (threads.empty()) return std::nullopt;
  return static_cast<Round>(threads.front()) + 1;
}

void KSubsets::on_injection(StationId s, Round, const Packet& p) {
  stations_[static_cast<std::size_t>(s)].pending.emplace_back(p.id, p.destination);
}

void KSubsets::allocate_pending(Round r) {
  for (StationId v = 0; v < layout_.n; ++v) {
    auto& st = stations_[static_cast<std::size_t>(v)];
    for (const auto& [id, w] : st.pending) {
      const auto& eligible = layout_.eligible(v, w);
      auto& counters = st.counters[w];
      if (counters.empty()) counters.assign(eligible.size(), 0);
      // Least-loaded eligible thread, first index on ties: keeps the counter
      // vector within a spread of one.
      std::size_t pick = 0;
      for (std::size_t i = 1; i < counters.size(); ++i)
        if (counters[i] < counters[pick]) pick = i;
      ++counters[pick];
      st.thread_queues[eligible[pick]].push_back(AllocEntry{id, r});
    }
    st.pending.clear();
  }
}

void KSubsets::on_round_start(Round r) {
  if (r > 1 && layout_.phase_boundary(r)) allocate_pending(r);
}

StationAction KSubsets::act(StationId s, Round r, const StationView&) {
  const int t = layout_.thread_of(r);
  auto& ts = threads_[static_cast<std::size_t>(t)];
  if (ts.list[static_cast<std::size_t>(ts.pos)] != s) return StationAction::listen();
  auto& queue = stations_[static_cast<std::size_t>(s)].thread_queues[t];
  if (use_rrw_) {
    for (const auto& entry : queue)
      if (entry.allocated_at < ts.phase_start) {
        return StationAction::send_packet(entry.id);
      }
    return StationAction::listen();
  }
  if (queue.empty()) return StationAction::listen();
  StationAction a = StationAction::send_packet(queue.front().id);
  a.control = BigFlagControl{static_cast<int>(queue.size()) >= big_threshold_};
  return a;
}

Reaction KSubsets::observe(StationId s, Round r, const Feedback& fb, const StationView&) {
  const int t = layout_.thread_of(r);
  auto& ts = threads_[static_cast<std::size_t>(t)];
  if (ts.updated_at != r) {
    ts.updated_at = r;
    if (fb.kind == FeedbackKind::Silent) {
      ts.pos = (ts.pos + 1) % static_cast<int>(ts.list.size());
      if (use_rrw_ && ts.pos == 0) ts.phase_start = r + 1;
    } else if (fb.kind == FeedbackKind::Heard && !use_rrw_) {
      if (const auto* flag = std::get_if<BigFlagControl>(&fb.message->control);
          flag && flag->big) {
        StationId sender = fb.message->sender;
        auto it = std::find(ts.list.begin(), ts.list.end(), sender);
        ts.list.erase(it);
        ts.list.insert(ts.list.begin(), sender);
        ts.pos = 0;
      }
    }
  }
  // The sender's transmission was heard, so the packet was consumed by its
  // destination; drop it from the local thread queue.
  if (fb.kind == FeedbackKind::Heard && fb.message->sender == s && fb.message->packet) {
    auto& queue = stations_[static_cast<std::size_t>(s)].thread_queues[t];
    PacketId id = fb.message->packet->id;
    auto it = std::find_if(queue.begin(), queue.end(),
                           [&](const AllocEntry& e) { return e.id == id; });
    if (it != queue.end()) queue.erase(it);
  }
  Reaction re;
  re.next_on = layout_.next_thread_round(s, r);
  return re;
}

long long KSubsets::max_allocation_imbalance() const {
  long long worst = 0;
  for (const auto& st : stations_) {
    for (const auto& [w, counters] : st.counters) {
      if (counters.empty()) continue;
      auto [lo, hi] = std::minmax_element(counters.begin(), counters.end());
      worst = std::max(worst, *hi - *lo);
    }
  }
  return worst;
}

ObliviousSchedule extract_schedule(const ThreadLayout& layout, Round horizon) {
  ObliviousSchedule sched;
  sched.n = layout.n;
  sched.cap = layout.k;
  sched.max_on_observed = layout.k;
  sched.horizon = horizon;
  sched.on_mask.resize(static_cast<std::size_t>(horizon), 0);
  std::vector<std::uint64_t> masks(layout.subsets.size(), 0);
  for (std::size_t t = 0; t < layout.subsets.size(); ++t)
    for (StationId s : layout.subsets[t]) masks[t] |= (1ULL << s);
  for (Round r = 1; r <= horizon; ++r)
    sched.on_mask[static_cast<std::size_t>(r - 1)] =
        masks[static_cast<std::size_t>(layout.thread_of(r))];
  return sched;
}

}  // namespace macsim
