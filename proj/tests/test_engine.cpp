#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "macsim/engine.hpp"
#include "macsim/report.hpp"

using namespace macsim;
using test::ScriptedAlgorithm;

namespace {

std::unique_ptr<InjectionSource> scripted_injections(
    std::vector<std::vector<Injection>> rows) {
  InjectionTrace trace;
  trace.per_round = std::move(rows);
  trace.horizon = static_cast<Round>(trace.per_round.size());
  return std::make_unique<TraceSource>(std::move(trace));
}

EngineConfig engine_config(int n, int cap, Round rounds) {
  EngineConfig cfg;
  cfg.n = n;
  cfg.energy_cap = cap;
  cfg.max_rounds = rounds;
  cfg.algorithm.id = "scripted";
  cfg.adversary.strategy = "scripted";
  return cfg;
}

}  // namespace

TEST_CASE("feedback trichotomy matches transmitter count") {
  // Round 1: two stations on, nobody transmits -> silent.
  // Round 2: both transmit -> collision, packets stay queued.
  // Round 3: one transmits to an on destination -> heard + delivered.
  std::map<Round, ScriptedAlgorithm::RoundScript> script;
  script[1] = {{0, 1}, {}, {}};
  script[2] = {{0, 1}, {{0, 1}, {1, 2}}, {}};
  script[3] = {{0, 1}, {{0, 1}}, {}};
  Engine engine(engine_config(4, 2, 3), std::make_unique<ScriptedAlgorithm>(script),
                scripted_injections({{{0, 1}, {1, 0}}}));  // packet 1: 0->1, packet 2: 1->0

  auto r1 = engine.step_round();
  CHECK(r1.feedback.kind == FeedbackKind::Silent);
  CHECK(!r1.delivered.has_value());
  CHECK(r1.on_stations == std::vector<StationId>{0, 1});

  auto r2 = engine.step_round();
  CHECK(r2.feedback.kind == FeedbackKind::Collision);
  CHECK(!r2.delivered.has_value());
  CHECK(engine.total_queued() == 2);

  auto r3 = engine.step_round();
  CHECK(r3.feedback.kind == FeedbackKind::Heard);
  REQUIRE(r3.delivered.has_value());
  CHECK(r3.delivered->id == 1);
  CHECK(r3.delivered->delivery_round == 3);
  CHECK(engine.total_queued() == 1);
}

TEST_CASE("heard packet with off destination and a claimed relay is adopted") {
  std::map<Round, ScriptedAlgorithm::RoundScript> script;
  script[1] = {{0, 2}, {{0, 1}}, {2}};  // destination 1 is off; 2 adopts
  Engine engine(engine_config(4, 2, 1), std::make_unique<ScriptedAlgorithm>(script),
                scripted_injections({{{0, 1}}}));
  auto out = engine.step_round();
  CHECK(out.feedback.kind == FeedbackKind::Heard);
  CHECK(!out.delivered.has_value());
  REQUIRE(out.adopted_by.has_value());
  CHECK(out.adopted_by->first == 2);
  CHECK(out.adopted_by->second.hops == std::vector<StationId>{0, 2});
  CHECK(engine.station_queue(2).size() == 1);
  CHECK(engine.station_queue(0).empty());
}

TEST_CASE("heard packet with no claimant stays with the sender") {
  std::map<Round, ScriptedAlgorithm::RoundScript> script;
  script[1] = {{0, 2}, {{0, 1}}, {}};
  Engine engine(engine_config(4, 2, 1), std::make_unique<ScriptedAlgorithm>(script),
                scripted_injections({{{0, 1}}}));
  engine.step_round();
  CHECK(engine.station_queue(0).size() == 1);
  CHECK(engine.total_queued() == 1);
}

TEST_CASE("two adoption claims are an engine error") {
  std::map<Round, ScriptedAlgorithm::RoundScript> script;
  script[1] = {{0, 2, 3}, {{0, 1}}, {2, 3}};
  Engine engine(engine_config(5, 3, 1), std::make_unique<ScriptedAlgorithm>(script),
                scripted_injections({{{0, 1}}}));
  CHECK_THROWS_AS(engine.step_round(), EngineError);
}

TEST_CASE("energy cap violation is detected") {
  std::map<Round, ScriptedAlgorithm::RoundScript> script;
  script[1] = {{0, 1, 2}, {}, {}};
  Engine engine(engine_config(4, 2, 1), std::make_unique<ScriptedAlgorithm>(script),
                scripted_injections({}));
  try {
    engine.step_round();
    FAIL("expected EnergyCapViolation");
  } catch (const EngineError& e) {
    CHECK(e.code() == EngineErrorCode::EnergyCapViolation);
    CHECK(e.round() == 1);
  }
}

TEST_CASE("transmitting a packet not in the queue is a phantom transmit") {
  std::map<Round, ScriptedAlgorithm::RoundScript> script;
  script[1] = {{0, 1}, {{0, 77}}, {}};
  Engine engine(engine_config(4, 2, 1), std::make_unique<ScriptedAlgorithm>(script),
                scripted_injections({}));
  try {
    engine.step_round();
    FAIL("expected PhantomTransmit");
  } catch (const EngineError& e) {
    CHECK(e.code() == EngineErrorCode::PhantomTransmit);
  }
}

TEST_CASE("self-addressed packets are consumed at injection with zero delay") {
  Engine engine(engine_config(4, 2, 2), nullptr,
                scripted_injections({{{2, 2}, {0, 1}}}));
  engine.step_round();
  engine.step_round();
  auto report = engine.take_report();
  CHECK(report.summary.injected == 2);
  CHECK(report.summary.delivered == 1);
  REQUIRE(report.per_packet[0].delivery_round.has_value());
  CHECK(*report.per_packet[0].delivery_round == report.per_packet[0].injection_round);
  CHECK(report.per_packet[0].hop_count == 1);
}

TEST_CASE("a timer keeps a station off for exactly the scheduled gap") {
  // Station 0 on at rounds 1 and 5 only: off for c = 3 rounds in between.
  std::map<Round, ScriptedAlgorithm::RoundScript> script;
  script[1] = {{0}, {}, {}};
  script[5] = {{0}, {}, {}};
  Engine engine(engine_config(3, 2, 6), std::make_unique<ScriptedAlgorithm>(script),
                scripted_injections({}));
  std::vector<int> on_counts;
  for (int i = 0; i < 6; ++i)
    on_counts.push_back(static_cast<int>(engine.step_round().on_stations.size()));
  CHECK(on_counts == std::vector<int>{1, 0, 0, 0, 1, 0});
}

TEST_CASE("null algorithm leaves scripted injections queued forever") {
  EngineConfig cfg = engine_config(5, 4, 50);
  cfg.algorithm.id = "null";
  Engine engine(cfg, make_algorithm(cfg),
                scripted_injections({{{0, 1}}, {{1, 2}}, {{2, 3}}}));
  engine.run_to_horizon();
  auto report = engine.take_report();
  CHECK(report.summary.injected == 3);
  CHECK(report.summary.delivered == 0);
  CHECK(report.summary.max_queue == 3);
  CHECK(report.per_round.back().total_queued == 3);
  auto audit = conservation_audit(report);
  CHECK(audit.pass);
}

TEST_CASE("zero-round horizon yields an empty report") {
  EngineConfig cfg = engine_config(4, 2, 0);
  cfg.algorithm.id = "null";
  cfg.adversary.strategy = "none";
  auto report = run_simulation(cfg);
  CHECK(report.per_round.empty());
  CHECK(report.summary.injected == 0);
}

TEST_CASE("conservation audit flags a mutated report") {
  EngineConfig cfg = engine_config(5, 4, 10);
  cfg.algorithm.id = "null";
  Engine engine(cfg, make_algorithm(cfg), scripted_injections({{{0, 1}}, {{1, 2}}}));
  engine.run_to_horizon();
  auto report = engine.take_report();
  REQUIRE(conservation_audit(report).pass);
  // One packet counted in two queues at round 7.
  report.per_round[6].per_station_queues[3] += 1;
  report.per_round[6].total_queued += 1;
  auto audit = conservation_audit(report);
  CHECK(!audit.pass);
  CHECK(audit.first_violation == 7);
}

namespace {

/// Deterministic chaos driver: a seeded wake-group schedule plus pseudo-random
/// transmissions and adoption claims, exercising all feedback kinds.
class ChaosAlgorithm : public Algorithm {
 public:
  ChaosAlgorithm(int n, int cap, Round horizon, unsigned seed) {
    std::mt19937 rng(seed);
    groups_.resize(static_cast<std::size_t>(horizon) + 1);
    for (auto& g : groups_) {
      int size = static_cast<int>(rng() % static_cast<unsigned>(cap + 1));
      while (static_cast<int>(g.size()) < size) {
        StationId s = static_cast<StationId>(rng() % static_cast<unsigned>(n));
        bool dup = false;
        for (StationId x : g) dup = dup || x == s;
        if (!dup) g.push_back(s);
      }
      std::sort(g.begin(), g.end());
    }
    decisions_.resize(groups_.size());
    for (auto& d : decisions_) d = rng();
  }

  std::string name() const override { return "chaos"; }

  std::optional<Round> first_wake(StationId s) const override {
    Round r = next_on_round(s, 0);
    if (r == 0) return std::nullopt;
    return r;
  }

  StationAction act(StationId s, Round r, const StationView& view) override {
    unsigned d = decisions_[static_cast<std::size_t>(r)];
    bool wants_tx = ((d >> (s % 16)) & 1u) != 0;
    if (wants_tx && !view.empty()) {
      std::size_t pick = (d >> 16) % view.size();
      return StationAction::send_packet(view.queue()[pick].packet.id);
    }
    return StationAction::listen();
  }

  Reaction observe(StationId s, Round r, const Feedback& fb, const StationView&) override {
    Reaction re;
    if (fb.kind == FeedbackKind::Heard && fb.message->packet &&
        fb.message->packet->destination != s) {
      // The smallest-named on station other than the sender claims the packet.
      const auto& g = groups_[static_cast<std::size_t>(r)];
      for (StationId cand : g) {
        if (cand == fb.message->sender) continue;
        re.adopt = (cand == s);
        break;
      }
    }
    Round next = next_on_round(s, r);
    if (next == 0) return Reaction::sleep_forever();
    re.next_on = next;
    return re;
  }

 private:
  Round next_on_round(StationId s, Round r) const {
    for (Round cand = r + 1; cand < static_cast<Round>(groups_.size()); ++cand)
      for (StationId x : groups_[static_cast<std::size_t>(cand)])
        if (x == s) return cand;
    return 0;
  }

  std::vector<std::vector<StationId>> groups_;
  std::vector<unsigned> decisions_;
};

/// Admissible pseudo-random injections, saturating a fraction of the budget.
std::vector<std::vector<Injection>> chaos_injections(int n, Round horizon,
                                                     const AdversaryType& adv,
                                                     unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<long long> counts;
  std::vector<std::vector<Injection>> rows(static_cast<std::size_t>(horizon));
  for (Round r = 1; r <= horizon; ++r) {
    counts.push_back(0);
    while (true) {
      ++counts.back();
      if (!validate_counts(counts, adv).pass || rng() % 3 == 0) {
        --counts.back();
        break;
      }
    }
    for (long long i = 0; i < counts.back(); ++i) {
      StationId src = static_cast<StationId>(rng() % static_cast<unsigned>(n));
      StationId dst = static_cast<StationId>(rng() % static_cast<unsigned>(n));
      rows[static_cast<std::size_t>(r - 1)].push_back(Injection{src, dst});
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("ten thousand randomized engine steps hold every channel invariant") {
  const int n = 6;
  const int cap = 4;
  const Round horizon = 10000;
  EngineConfig cfg = engine_config(n, cap, horizon);
  AdversaryType adv{Rational(1, 2), Rational(3)};
  Engine engine(cfg, std::make_unique<ChaosAlgorithm>(n, cap, horizon, 0xC0FFEE),
                scripted_injections(chaos_injections(n, horizon, adv, 0xBEEF)));
  long long heard = 0, silent = 0, collisions = 0;
  for (Round r = 1; r <= horizon; ++r) {
    auto out = engine.step_round();
    CHECK(static_cast<int>(out.on_stations.size()) <= cap);
    switch (out.feedback.kind) {
      case FeedbackKind::Silent:
        ++silent;
        CHECK(out.transmitters.empty());
        break;
      case FeedbackKind::Heard:
        ++heard;
        CHECK(out.transmitters.size() == 1);
        break;
      case FeedbackKind::Collision:
        ++collisions;
        CHECK(out.transmitters.size() >= 2);
        break;
    }
  }
  // The chaos run must genuinely exercise all three feedback kinds.
  CHECK(heard > 100);
  CHECK(silent > 100);
  CHECK(collisions > 100);
  auto report = engine.take_report();
  auto audit = conservation_audit(report);
  CHECK(audit.pass);
  CHECK(report.summary.injected ==
        report.summary.delivered + report.per_round.back().total_queued);
}

TEST_CASE("equal configs produce equal reports") {
  EngineConfig cfg = engine_config(5, 2, 400);
  cfg.algorithm.id = "count-hop";
  cfg.adversary.strategy = "saturating";
  cfg.adversary.pattern = "round-robin";
  cfg.adversary.rho = Rational(1, 2);
  cfg.adversary.beta = Rational(1);
  auto a = run_simulation(cfg);
  auto b = run_simulation(cfg);
  REQUIRE(a.per_round.size() == b.per_round.size());
  for (std::size_t i = 0; i < a.per_round.size(); ++i) {
    CHECK(a.per_round[i].total_queued == b.per_round[i].total_queued);
    CHECK(a.per_round[i].on_count == b.per_round[i].on_count);
    CHECK(a.per_round[i].feedback == b.per_round[i].feedback);
    CHECK(a.per_round[i].delivered_id == b.per_round[i].delivered_id);
  }
  CHECK(a.summary.max_latency_delivered == b.summary.max_latency_delivered);
}
