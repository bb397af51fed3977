#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "macsim/rational.hpp"
#include "macsim/types.hpp"

namespace macsim {

/// Leaky-bucket injector class: at most rho*t + beta packets in any
/// contiguous interval of t rounds.
struct AdversaryType {
  Rational rho{1};
  Rational beta{1};

  /// Largest packet count admissible in a single round.
  long long burstiness() const { return (beta + rho).floor(); }
  bool valid() const {
    return rho > Rational(0) && rho <= Rational(1) && beta >= Rational(1);
  }
};

struct Injection {
  StationId station = 0;
  StationId destination = 0;
};

/// A fully materialized injection sequence over [1, horizon].
struct InjectionTrace {
  Round horizon = 0;
  /// per_round[r-1] lists the injections of round r in order.
  std::vector<std::vector<Injection>> per_round;

  long long total_packets() const {
    long long s = 0;
    for (const auto& v : per_round) s += static_cast<long long>(v.size());
    return s;
  }
};

struct TraceViolation {
  Round interval_start = 0;
  Round interval_end = 0;
  long long count = 0;
  Rational allowed{0};
};

struct ValidationResult {
  bool pass = true;
  std::optional<TraceViolation> violation;
};

/// Checks every interval of the trace against rho*t + beta using an O(T)
/// sliding excess; equivalent to the all-intervals check (the unit suite
/// cross-verifies against a brute-force oracle on small horizons).
ValidationResult validate_trace(const InjectionTrace& trace, const AdversaryType& adv);

/// Same check on a bare per-round count vector.
ValidationResult validate_counts(const std::vector<long long>& counts,
                                 const AdversaryType& adv);

/// Where saturating injections go. The pattern picks (station, destination)
/// for the c-th injected packet of round r.
struct DestinationPattern {
  enum class Kind { SinglePair, SingleTarget, RoundRobin, AlternatingBlocks };
  Kind kind = Kind::RoundRobin;
  int n = 0;
  StationId station = 0;       // SinglePair / SingleTarget / AlternatingBlocks first station
  StationId destination = 0;   // SinglePair
  StationId station_b = 0;     // AlternatingBlocks second station
  Round block_length = 0;      // AlternatingBlocks

  Injection pick(Round round, long long counter) const;

  static DestinationPattern single_pair(int n, StationId s, StationId d);
  static DestinationPattern single_target(int n, StationId s);
  static DestinationPattern round_robin(int n);
  static DestinationPattern alternating_blocks(int n, StationId a, StationId b, Round block);
};

/// Greedy maximal admissible trace: in each round injects the largest packet
/// count the bucket allows, earliest rounds first.
InjectionTrace saturating_trace(const AdversaryType& adv, const DestinationPattern& pattern,
                                Round horizon);

/// A precomputed station-by-round on/off matrix. cap is the nominal cap the
/// schedule was designed for; max_on_observed is the widest round actually
/// materialized (the two differ for layouts that keep an extra relay awake).
struct ObliviousSchedule {
  int n = 0;
  int cap = 0;
  int max_on_observed = 0;
  Round horizon = 0;
  /// on_mask[r-1] bit s set iff station s is on in round r. n <= 64.
  std::vector<std::uint64_t> on_mask;

  bool on(StationId s, Round r) const {
    return (on_mask[static_cast<std::size_t>(r - 1)] >> s) & 1u;
  }
  int on_count(Round r) const {
    return __builtin_popcountll(on_mask[static_cast<std::size_t>(r - 1)]);
  }
};

struct StationWitness {
  StationId station = 0;
  long long on_rounds = 0;
  Rational residual_bound{0};
  InjectionTrace trace;
};

struct PairWitness {
  StationId from = 0;
  StationId to = 0;
  long long joint_on_rounds = 0;
  Rational residual_bound{0};
  InjectionTrace trace;
};

class RateTooLow : public std::runtime_error {
 public:
  explicit RateTooLow(const std::string& what) : std::runtime_error(what) {}
};

/// Picks the station least often on in [1, t] (ties: fewer on-rounds, then
/// smaller name) and floods it at the maximal admissible rate, destinations
/// cycling over the other stations. Requires rho > cap/n.
StationWitness oblivious_station_witness(const ObliviousSchedule& sched,
                                         const AdversaryType& adv, Round t);

/// Picks the ordered pair least often jointly on in [1, t] (ties: fewer
/// on-rounds of the source, then of the sink, then lexicographic) and floods
/// the source with packets for the sink. Requires rho > cap(cap-1)/(n(n-1)).
PairWitness oblivious_pair_witness(const ObliviousSchedule& sched,
                                   const AdversaryType& adv, Round t);

/// Round-by-round injection source driven by the engine. Implementations are
/// deterministic; the on-set passed in is the one already fixed for the round
/// by earlier wakeup decisions.
class InjectionSource {
 public:
  virtual ~InjectionSource() = default;
  virtual std::vector<Injection> injections_for(Round round,
                                                const std::vector<StationId>& on_set) = 0;
};

/// Replays a materialized trace.
class TraceSource : public InjectionSource {
 public:
  explicit TraceSource(InjectionTrace trace) : trace_(std::move(trace)) {}
  std::vector<Injection> injections_for(Round round, const std::vector<StationId>&) override {
    if (round < 1 || round > trace_.horizon) return {};
    return trace_.per_round[static_cast<std::size_t>(round - 1)];
  }
  const InjectionTrace& trace() const { return trace_; }

 private:
  InjectionTrace trace_;
};

/// Two-case strategy against cap-2 systems at rate 1: keep one packet per
/// round flowing into a helper station while a tracked off station exists;
/// alternate the labels between the tracked station and a second helper; when
/// the tracked station first switches on, commit and track a fresh station.
///
/// This is an online restatement of an indistinguishability argument: the
/// committed relabeling cannot retract packets already injected, and the
/// tracked station is chosen from on/off observations only, so the automaton
/// is strictly weaker than the unrestricted adversary it mimics. It still
/// drives any cap-2 algorithm's queues upward at rate 1.
class AdaptiveCap2Source : public InjectionSource {
 public:
  AdaptiveCap2Source(int n, int energy_cap);
  std::vector<Injection> injections_for(Round round,
                                        const std::vector<StationId>& on_set) override;

  long long iterations_completed() const { return iterations_; }
  StationId tracked_station() const { return tracked_; }

 private:
  void retarget(const std::vector<StationId>& on_set);

  int n_;
  StationId tracked_ = -1;
  StationId helper_a_ = -1;
  StationId helper_b_ = -1;
  bool odd_parity_ = true;
  long long iterations_ = 0;
  std::vector<bool> ever_touched_;
};

}  // namespace macsim
