#include "macsim/adversary.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace macsim {

namespace {

/// Sliding excess over the rate line. E_r = c_r - rho + max(0, E_{r-1}) equals
/// the largest over all intervals ending at r of (count - rho * length); the
/// trace is admissible iff E_r <= beta for every r.
struct ExcessScan {
  Rational excess{0};
  bool positive = false;

  /// Feeds one round's count; returns the new ending-here excess.
  Rational feed(long long count, const Rational& rho) {
    Rational base = positive ? excess : Rational(0);
    excess = base + Rational(count) - rho;
    positive = excess > Rational(0);
    return excess;
  }
};

std::vector<long long> counts_of(const InjectionTrace& trace) {
  std::vector<long long> counts;
  counts.reserve(trace.per_round.size());
  for (const auto& v : trace.per_round) counts.push_back(static_cast<long long>(v.size()));
  return counts;
}

}  // namespace

ValidationResult validate_counts(const std::vector<long long>& counts,
                                 const AdversaryType& adv) {
  ExcessScan scan;
  // Track, for the first violation, the start of the maximizing interval: it
  // restarts whenever the running excess drops to/below zero.
  Round window_start = 1;
  long long window_count = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const Round r = static_cast<Round>(i + 1);
    if (!scan.positive) {
      window_start = r;
      window_count = 0;
    }
    window_count += counts[i];
    Rational excess = scan.feed(counts[i], adv.rho);
    if (excess > adv.beta) {
      TraceViolation v;
      v.interval_start = window_start;
      v.interval_end = r;
      v.count = window_count;
      v.allowed = adv.rho * Rational(r - window_start + 1) + adv.beta;
      return ValidationResult{false, v};
    }
  }
  return ValidationResult{true, std::nullopt};
}

ValidationResult validate_trace(const InjectionTrace& trace, const AdversaryType& adv) {
  return validate_counts(counts_of(trace), adv);
}

Injection DestinationPattern::pick(Round round, long long counter) const {
  auto cycle_not = [this](StationId avoid, long long c) {
    StationId d = static_cast<StationId>(c % (n - 1));
    if (d >= avoid) ++d;
    return d;
  };
  switch (kind) {
    case Kind::SinglePair:
      return Injection{station, destination};
    case Kind::SingleTarget:
      return Injection{station, cycle_not(station, counter)};
    case Kind::RoundRobin: {
      StationId s = static_cast<StationId>(counter % n);
      return Injection{s, cycle_not(s, counter / n)};
    }
    case Kind::AlternatingBlocks: {
      StationId s = ((round - 1) / block_length) % 2 == 0 ? station : station_b;
      return Injection{s, cycle_not(s, counter)};
    }
  }
  return Injection{0, 1};
}

DestinationPattern DestinationPattern::single_pair(int n, StationId s, StationId d) {
  DestinationPattern p;
  p.kind = Kind::SinglePair;
  p.n = n;
  p.station = s;
  p.destination = d;
  return p;
}

DestinationPattern DestinationPattern::single_target(int n, StationId s) {
  DestinationPattern p;
  p.kind = Kind::SingleTarget;
  p.n = n;
  p.station = s;
  return p;
}

DestinationPattern DestinationPattern::round_robin(int n) {
  DestinationPattern p;
  p.kind = Kind::RoundRobin;
  p.n = n;
  return p;
}

DestinationPattern DestinationPattern::alternating_blocks(int n, StationId a, StationId b,
                                                          Round block) {
  DestinationPattern p;
  p.kind = Kind::AlternatingBlocks;
  p.n = n;
  p.station = a;
  p.station_b = b;
  p.block_length = block > 0 ? block : 1;
  return p;
}

InjectionTrace saturating_trace(const AdversaryType& adv, const DestinationPattern& pattern,
                                Round horizon) {
  InjectionTrace trace;
  trace.horizon = horizon;
  trace.per_round.resize(static_cast<std::size_t>(horizon));
  ExcessScan scan;
  long long counter = 0;
  for (Round r = 1; r <= horizon; ++r) {
    // Largest m with m - rho + max(0, E) <= beta.
    Rational base = scan.positive ? scan.excess : Rational(0);
    Rational budget = adv.beta + adv.rho - base;
    long long m = std::max<long long>(0, budget.floor());
    scan.feed(m, adv.rho);
    auto& row = trace.per_round[static_cast<std::size_t>(r - 1)];
    for (long long i = 0; i < m; ++i) row.push_back(pattern.pick(r, counter++));
  }
  return trace;
}

namespace {

/// Maximal-rate trace into one fixed source station. Destinations cycle over
/// the other stations, or stick to one sink when provided.
InjectionTrace flood_station(const AdversaryType& adv, int n, StationId source,
                             std::optional<StationId> sink, Round horizon) {
  DestinationPattern pattern = sink
                                   ? DestinationPattern::single_pair(n, source, *sink)
                                   : DestinationPattern::single_target(n, source);
  return saturating_trace(adv, pattern, horizon);
}

}  // namespace

StationWitness oblivious_station_witness(const ObliviousSchedule& sched,
                                         const AdversaryType& adv, Round t) {
  if (t < 1 || t > sched.horizon) throw std::invalid_argument("witness horizon out of range");
  const Rational threshold(sched.cap, sched.n);
  if (!(adv.rho > threshold))
    throw RateTooLow("station witness needs rho > " + threshold.str() + ", got " +
                     adv.rho.str());
  std::vector<long long> on_rounds(static_cast<std::size_t>(sched.n), 0);
  for (Round r = 1; r <= t; ++r)
    for (StationId s = 0; s < sched.n; ++s)
      if (sched.on(s, r)) ++on_rounds[static_cast<std::size_t>(s)];

  StationId best = 0;
  for (StationId s = 1; s < sched.n; ++s)
    if (on_rounds[static_cast<std::size_t>(s)] < on_rounds[static_cast<std::size_t>(best)])
      best = s;

  StationWitness w;
  w.station = best;
  w.on_rounds = on_rounds[static_cast<std::size_t>(best)];
  w.residual_bound = Rational(t) * (adv.rho - threshold) - adv.beta;
  w.trace = flood_station(adv, sched.n, best, std::nullopt, t);
  return w;
}

PairWitness oblivious_pair_witness(const ObliviousSchedule& sched, const AdversaryType& adv,
                                   Round t) {
  if (t < 1 || t > sched.horizon) throw std::invalid_argument("witness horizon out of range");
  const Rational threshold(static_cast<std::int64_t>(sched.cap) * (sched.cap - 1),
                           static_cast<std::int64_t>(sched.n) * (sched.n - 1));
  if (!(adv.rho > threshold))
    throw RateTooLow("pair witness needs rho > " + threshold.str() + ", got " + adv.rho.str());

  const int n = sched.n;
  std::vector<long long> joint(static_cast<std::size_t>(n) * n, 0);
  std::vector<long long> on_rounds(static_cast<std::size_t>(n), 0);
  for (Round r = 1; r <= t; ++r) {
    std::uint64_t mask = sched.on_mask[static_cast<std::size_t>(r - 1)];
    for (StationId a = 0; a < n; ++a) {
      if (!((mask >> a) & 1u)) continue;
      ++on_rounds[static_cast<std::size_t>(a)];
      for (StationId b = 0; b < n; ++b)
        if (b != a && ((mask >> b) & 1u)) ++joint[static_cast<std::size_t>(a) * n + b];
    }
  }

  // Fewest joint-on rounds first; among ties prefer the pair whose endpoints
  // are themselves least often on (the stronger witness), then lexicographic.
  StationId bw = 0, bz = 1;
  auto key = [&](StationId w, StationId z) {
    return std::tuple(joint[static_cast<std::size_t>(w) * n + z],
                      on_rounds[static_cast<std::size_t>(w)],
                      on_rounds[static_cast<std::size_t>(z)], w, z);
  };
  for (StationId w = 0; w < n; ++w)
    for (StationId z = 0; z < n; ++z)
      if (w != z && key(w, z) < key(bw, bz)) {
        bw = w;
        bz = z;
      }

  PairWitness w;
  w.from = bw;
  w.to = bz;
  w.joint_on_rounds = joint[static_cast<std::size_t>(bw) * n + bz];
  w.residual_bound = Rational(t) * (adv.rho - threshold) - adv.beta;
  w.trace = flood_station(adv, n, bw, bz, t);
  return w;
}

AdaptiveCap2Source::AdaptiveCap2Source(int n, int energy_cap) : n_(n) {
  if (energy_cap >= 3)
    throw EngineError(EngineErrorCode::InvalidConfig, 0,
                      "adaptive cap-2 strategy is inapplicable at cap >= 3");
  if (n < 3)
    throw EngineError(EngineErrorCode::InvalidConfig, 0, "need at least 3 stations");
  ever_touched_.assign(static_cast<std::size_t>(n), false);
}

void AdaptiveCap2Source::retarget(const std::vector<StationId>& on_set) {
  auto is_on = [&](StationId s) {
    return std::binary_search(on_set.begin(), on_set.end(), s);
  };
  // Prefer an off station no injected packet has ever touched; fall back to
  // any off station, then to the largest name.
  StationId pick = -1;
  for (StationId s = 0; s < n_; ++s)
    if (!is_on(s) && !ever_touched_[static_cast<std::size_t>(s)] && s != tracked_) {
      pick = s;
      break;
    }
  if (pick == -1)
    for (StationId s = 0; s < n_; ++s)
      if (!is_on(s) && s != tracked_) {
        pick = s;
        break;
      }
  if (pick == -1) pick = tracked_ == n_ - 1 ? n_ - 2 : n_ - 1;
  tracked_ = pick;
  helper_a_ = -1;
  helper_b_ = -1;
  for (StationId s = 0; s < n_ && (helper_a_ == -1 || helper_b_ == -1); ++s) {
    if (s == tracked_) continue;
    if (helper_a_ == -1)
      helper_a_ = s;
    else
      helper_b_ = s;
  }
  odd_parity_ = true;
}

std::vector<Injection> AdaptiveCap2Source::injections_for(
    Round round, const std::vector<StationId>& on_set) {
  (void)round;
  auto is_on = [&](StationId s) {
    return std::binary_search(on_set.begin(), on_set.end(), s);
  };
  if (tracked_ == -1) {
    retarget(on_set);
  } else if (is_on(tracked_)) {
    // The tracked station woke up: commit to the all-to-helper reading and
    // start a fresh iteration against a new sleeper.
    ++iterations_;
    retarget(on_set);
  }
  StationId dest = odd_parity_ ? tracked_ : helper_b_;
  odd_parity_ = !odd_parity_;
  ever_touched_[static_cast<std::size_t>(helper_a_)] = true;
  ever_touched_[static_cast<std::size_t>(dest)] = true;
  return {Injection{helper_a_, dest}};
}

}  // namespace macsim
