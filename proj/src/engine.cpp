#include "macsim/engine.hpp"

#include <algorithm>
#include <cassert>

#include "macsim/adjust_window.hpp"
#include "macsim/count_hop.hpp"
#include "macsim/io.hpp"
#include "macsim/k_clique.hpp"
#include "macsim/k_cycle.hpp"
#include "macsim/k_subsets.hpp"
#include "macsim/oblivious.hpp"
#include "macsim/orchestra.hpp"

namespace macsim {

namespace {

/// Keeps every station off forever. Used for horizon/bookkeeping tests.
class NullAlgorithm : public Algorithm {
 public:
  std::string name() const override { return "null"; }
  std::optional<Round> first_wake(StationId) const override { return std::nullopt; }
  StationAction act(StationId, Round, const StationView&) override {
    return StationAction::listen();
  }
  Reaction observe(StationId, Round, const Feedback&, const StationView&) override {
    return Reaction::stay_on();
  }
};

class EmptySource : public InjectionSource {
 public:
  std::vector<Injection> injections_for(Round, const std::vector<StationId>&) override {
    return {};
  }
};

}  // namespace

void EngineConfig::validate() const {
  if (n < 3) throw EngineError(EngineErrorCode::InvalidConfig, 0, "need at least 3 stations");
  if (n > 64) throw EngineError(EngineErrorCode::InvalidConfig, 0, "at most 64 stations supported");
  if (energy_cap < 2 || energy_cap >= n)
    throw EngineError(EngineErrorCode::InvalidConfig, 0,
                      "energy cap must satisfy 2 <= cap < n");
  if (max_rounds < 0)
    throw EngineError(EngineErrorCode::InvalidConfig, 0, "negative horizon");
}

Engine::Engine(EngineConfig config, std::unique_ptr<Algorithm> algorithm,
               std::unique_ptr<InjectionSource> source)
    : config_(std::move(config)),
      algorithm_(std::move(algorithm)),
      source_(std::move(source)) {
  config_.validate();
  if (!algorithm_) algorithm_ = std::make_unique<NullAlgorithm>();
  if (!source_) source_ = std::make_unique<EmptySource>();
  queues_.resize(static_cast<std::size_t>(config_.n));
  next_on_.assign(static_cast<std::size_t>(config_.n), 0);
  for (StationId s = 0; s < config_.n; ++s) {
    auto wake = algorithm_->first_wake(s);
    if (wake) {
      if (*wake < 1)
        throw EngineError(EngineErrorCode::InvalidAction, 0, "first wake before round 1");
      next_on_[static_cast<std::size_t>(s)] = *wake;
    }
  }
  report_.per_round.reserve(static_cast<std::size_t>(config_.max_rounds));
}

Engine::~Engine() = default;

std::vector<StationId> Engine::on_set_for_round(Round r) const {
  std::vector<StationId> on;
  for (StationId s = 0; s < config_.n; ++s)
    if (next_on_[static_cast<std::size_t>(s)] == r) on.push_back(s);
  return on;
}

void Engine::record_delivery(Packet p, Round r) {
  p.delivery_round = r;
  if (p.id < static_cast<PacketId>(delivered_ids_.size()) &&
      delivered_ids_[static_cast<std::size_t>(p.id)])
    throw EngineError(EngineErrorCode::DuplicateDelivery, r,
                      "packet " + std::to_string(p.id) + " delivered twice");
  if (p.id >= static_cast<PacketId>(delivered_ids_.size()))
    delivered_ids_.resize(static_cast<std::size_t>(p.id) + 1, false);
  delivered_ids_[static_cast<std::size_t>(p.id)] = true;
  ++delivered_so_far_;
  auto& row = report_.per_packet[static_cast<std::size_t>(p.id - 1)];
  row.delivery_round = r;
  row.hop_count = p.hop_count();
}

void Engine::apply_injections(Round r, const std::vector<Injection>& injections,
                              RoundRow& row) {
  for (const auto& inj : injections) {
    if (inj.station < 0 || inj.station >= config_.n || inj.destination < 0 ||
        inj.destination >= config_.n)
      throw EngineError(EngineErrorCode::InvalidConfig, r, "injection out of range");
    Packet p;
    p.id = next_packet_id_++;
    p.destination = inj.destination;
    p.injection_round = r;
    p.injection_station = inj.station;
    p.hops = {inj.station};
    ++injected_so_far_;
    ++row.injected;
    report_.per_packet.push_back(PacketRow{p.id, r, inj.station, inj.destination,
                                           std::nullopt, 1});
    if (inj.destination == inj.station) {
      // Self-addressed: consumed at injection, never queued, delay 0.
      record_delivery(std::move(p), r);
      continue;
    }
    queues_[static_cast<std::size_t>(inj.station)].push_back(QueuedPacket{p, r});
    ++total_queued_;
    algorithm_->on_injection(inj.station, r, p);
  }
}

RoundOutcome Engine::step_round() {
  const Round r = next_round_++;
  algorithm_->on_round_start(r);

  RoundOutcome outcome;
  outcome.round = r;
  outcome.on_stations = on_set_for_round(r);

  RoundRow row;
  row.round = r;

  apply_injections(r, source_->injections_for(r, outcome.on_stations), row);

  if (static_cast<int>(outcome.on_stations.size()) > config_.energy_cap)
    throw EngineError(EngineErrorCode::EnergyCapViolation, r,
                      std::to_string(outcome.on_stations.size()) + " stations on, cap " +
                          std::to_string(config_.energy_cap));

  // Collect actions from the on stations in name order.
  struct Pending {
    StationId sender;
    Message message;
  };
  std::vector<Pending> transmissions;
  for (StationId s : outcome.on_stations) {
    auto& queue = queues_[static_cast<std::size_t>(s)];
    StationAction action = algorithm_->act(s, r, StationView(queue));
    if (action.mode == Mode::Off)
      throw EngineError(EngineErrorCode::InvalidAction, r,
                        "on station " + std::to_string(s) + " returned Off");
    if (action.mode != Mode::Transmit) continue;
    Message m;
    m.sender = s;
    m.control = std::move(action.control);
    if (action.transmit_packet) {
      auto it = std::find_if(queue.begin(), queue.end(), [&](const QueuedPacket& q) {
        return q.packet.id == *action.transmit_packet;
      });
      if (it == queue.end())
        throw EngineError(EngineErrorCode::PhantomTransmit, r,
                          "station " + std::to_string(s) + " transmitted packet " +
                              std::to_string(*action.transmit_packet) +
                              " not in its queue");
      m.packet = it->packet;
    }
    outcome.transmitters.push_back(s);
    transmissions.push_back(Pending{s, std::move(m)});
  }

  // Channel feedback: exactly one transmitter is heard by every on station,
  // two or more collide into nothing, none is a silent round.
  if (transmissions.empty()) {
    outcome.feedback.kind = FeedbackKind::Silent;
  } else if (transmissions.size() == 1) {
    outcome.feedback.kind = FeedbackKind::Heard;
    outcome.feedback.message = transmissions.front().message;
  } else {
    outcome.feedback.kind = FeedbackKind::Collision;
  }

  // Every on station observes the same feedback, including the transmitter.
  std::vector<std::pair<StationId, Reaction>> reactions;
  reactions.reserve(outcome.on_stations.size());
  for (StationId s : outcome.on_stations) {
    Reaction re = algorithm_->observe(s, r, outcome.feedback,
                                      StationView(queues_[static_cast<std::size_t>(s)]));
    reactions.emplace_back(s, re);
  }

  // Resolve the heard packet: delivery if its destination is on, otherwise a
  // single claimed adoption; unclaimed packets stay with the sender.
  if (outcome.feedback.kind == FeedbackKind::Heard && outcome.feedback.message->packet) {
    const StationId sender = outcome.feedback.message->sender;
    const Packet& heard = *outcome.feedback.message->packet;
    auto& sender_queue = queues_[static_cast<std::size_t>(sender)];
    auto remove_from_sender = [&]() {
      auto it = std::find_if(sender_queue.begin(), sender_queue.end(),
                             [&](const QueuedPacket& q) { return q.packet.id == heard.id; });
      assert(it != sender_queue.end());
      sender_queue.erase(it);
      --total_queued_;
    };

    bool destination_on = std::binary_search(outcome.on_stations.begin(),
                                             outcome.on_stations.end(), heard.destination);
    if (destination_on) {
      remove_from_sender();
      Packet delivered = heard;
      record_delivery(delivered, r);
      delivered.delivery_round = r;
      outcome.delivered = delivered;
      row.delivered_id = heard.id;
    } else {
      StationId adopter = -1;
      for (const auto& [s, re] : reactions) {
        if (!re.adopt) continue;
        if (adopter != -1)
          throw EngineError(EngineErrorCode::AdoptionConflict, r,
                            "stations " + std::to_string(adopter) + " and " +
                                std::to_string(s) + " both claimed the packet");
        adopter = s;
      }
      if (adopter == sender) {
        // The sender keeps its own packet; only the arrival round is renewed.
        auto it = std::find_if(sender_queue.begin(), sender_queue.end(),
                               [&](const QueuedPacket& q) { return q.packet.id == heard.id; });
        assert(it != sender_queue.end());
        it->arrival = r;
        outcome.adopted_by = {adopter, it->packet};
      } else if (adopter != -1) {
        remove_from_sender();
        Packet relayed = heard;
        relayed.hops.push_back(adopter);
        queues_[static_cast<std::size_t>(adopter)].push_back(QueuedPacket{relayed, r});
        ++total_queued_;
        outcome.adopted_by = {adopter, relayed};
        report_.per_packet[static_cast<std::size_t>(heard.id - 1)].hop_count =
            relayed.hop_count();
      }
      // No adopter: the packet stays queued at the sender.
    }
  } else {
    // Nothing heard: adoption claims are only legal against a heard packet.
    for (const auto& [s, re] : reactions)
      if (re.adopt)
        throw EngineError(EngineErrorCode::InvalidAction, r,
                          "station " + std::to_string(s) +
                              " claimed adoption without a heard packet");
  }

  // Wakeup timers: a station off for c rounds returns exactly at r + c + 1.
  for (const auto& [s, re] : reactions) {
    if (re.never_again) {
      next_on_[static_cast<std::size_t>(s)] = 0;
      continue;
    }
    Round next = re.next_on == 0 ? r + 1 : re.next_on;
    if (next <= r)
      throw EngineError(EngineErrorCode::InvalidAction, r,
                        "station " + std::to_string(s) + " scheduled a past wake");
    next_on_[static_cast<std::size_t>(s)] = next;
  }

  // Conservation is an engine invariant, revalidated every round.
  if (injected_so_far_ != delivered_so_far_ + total_queued_)
    throw EngineError(EngineErrorCode::AlgorithmAssertion, r,
                      "conservation broke: injected != delivered + queued");

  row.total_queued = total_queued_;
  row.on_count = static_cast<int>(outcome.on_stations.size());
  row.feedback = outcome.feedback.kind;
  if (outcome.feedback.kind == FeedbackKind::Heard)
    row.control_bits = outcome.feedback.message->control_bits();
  if (config_.record_station_queues) {
    row.per_station_queues.resize(static_cast<std::size_t>(config_.n));
    for (StationId s = 0; s < config_.n; ++s)
      row.per_station_queues[static_cast<std::size_t>(s)] =
          static_cast<std::int32_t>(queues_[static_cast<std::size_t>(s)].size());
  }
  report_.per_round.push_back(std::move(row));
  return outcome;
}

void Engine::run_to_horizon() {
  while (!finished()) step_round();
}

ExperimentReport Engine::take_report() {
  auto& s = report_.summary;
  s = ReportSummary{};
  s.rounds_executed = static_cast<Round>(report_.per_round.size());
  s.injected = injected_so_far_;
  s.delivered = delivered_so_far_;
  s.undelivered = injected_so_far_ - delivered_so_far_;
  for (const auto& row : report_.per_round) {
    s.max_queue = std::max(s.max_queue, row.total_queued);
    s.max_on_count = std::max(s.max_on_count, row.on_count);
    s.max_control_bits = std::max(s.max_control_bits, row.control_bits);
    if (row.feedback == FeedbackKind::Collision) ++s.collision_rounds;
    // Light round: a message heard with control content but no packet aboard.
    if (row.feedback == FeedbackKind::Heard && row.control_bits > 0 && !row.delivered_id)
      ++s.light_rounds;
  }
  const Round horizon = s.rounds_executed;
  for (const auto& p : report_.per_packet) {
    if (p.delivery_round) {
      s.max_latency_delivered =
          std::max(s.max_latency_delivered, *p.delivery_round - p.injection_round);
    } else {
      s.max_undelivered_age = std::max(s.max_undelivered_age, horizon - p.injection_round);
    }
    s.max_hop_count = std::max(s.max_hop_count, p.hop_count);
  }
  return std::move(report_);
}

std::unique_ptr<Algorithm> make_algorithm(const EngineConfig& config) {
  const auto& id = config.algorithm.id;
  if (id == "null") return std::make_unique<NullAlgorithm>();
  if (id == "orchestra") return std::make_unique<Orchestra>(config.n);
  if (id == "count-hop")
    return std::make_unique<CountHop>(config.n, config.max_rounds,
                                      Rational(config.adversary.beta).floor());
  if (id == "adjust-window") return std::make_unique<AdjustWindow>(config.n);
  if (id == "k-cycle") return std::make_unique<KCycle>(config.n, config.algorithm.k);
  if (id == "k-clique") return std::make_unique<KClique>(config.n, config.algorithm.k);
  if (id == "k-subsets")
    return std::make_unique<KSubsets>(config.n, config.algorithm.k,
                                      config.algorithm.mbtf_threshold,
                                      config.algorithm.use_rrw);
  throw EngineError(EngineErrorCode::InvalidConfig, 0, "unknown algorithm: " + id);
}

std::unique_ptr<InjectionSource> make_injection_source(const EngineConfig& config) {
  const auto& adv = config.adversary;
  AdversaryType type{adv.rho, adv.beta};
  if (adv.strategy == "none") return std::make_unique<EmptySource>();
  if (adv.strategy == "scripted") {
    InjectionTrace trace;
    if (!adv.trace_file.empty()) {
      trace = read_trace_csv(adv.trace_file);
    } else {
      trace.per_round = adv.scripted;
      trace.horizon = static_cast<Round>(trace.per_round.size());
    }
    trace.per_round.resize(static_cast<std::size_t>(
        std::max<Round>(trace.horizon, config.max_rounds)));
    trace.horizon = static_cast<Round>(trace.per_round.size());
    return std::make_unique<TraceSource>(std::move(trace));
  }
  if (adv.strategy == "saturating") {
    if (!type.valid())
      throw EngineError(EngineErrorCode::InvalidConfig, 0, "invalid adversary type");
    DestinationPattern pattern;
    if (adv.pattern == "single-pair")
      pattern = DestinationPattern::single_pair(config.n, adv.station, adv.destination);
    else if (adv.pattern == "single-target")
      pattern = DestinationPattern::single_target(config.n, adv.station);
    else if (adv.pattern == "round-robin")
      pattern = DestinationPattern::round_robin(config.n);
    else if (adv.pattern == "alternating-blocks")
      pattern = DestinationPattern::alternating_blocks(config.n, adv.station, adv.station_b,
                                                       adv.block_length);
    else
      throw EngineError(EngineErrorCode::InvalidConfig, 0, "unknown pattern: " + adv.pattern);
    return std::make_unique<TraceSource>(saturating_trace(type, pattern, config.max_rounds));
  }
  if (adv.strategy == "station-witness" || adv.strategy == "pair-witness") {
    ObliviousSchedule sched = extract_oblivious_schedule(config, config.max_rounds);
    if (adv.strategy == "station-witness") {
      auto witness = oblivious_station_witness(sched, type, config.max_rounds);
      return std::make_unique<TraceSource>(std::move(witness.trace));
    }
    auto witness = oblivious_pair_witness(sched, type, config.max_rounds);
    return std::make_unique<TraceSource>(std::move(witness.trace));
  }
  if (adv.strategy == "adaptive-cap2")
    return std::make_unique<AdaptiveCap2Source>(config.n, config.energy_cap);
  throw EngineError(EngineErrorCode::InvalidConfig, 0, "unknown adversary: " + adv.strategy);
}

ObliviousSchedule extract_oblivious_schedule(const EngineConfig& config, Round horizon) {
  const auto& id = config.algorithm.id;
  if (id == "k-cycle")
    return extract_schedule(GroupLayout::build(config.n, config.algorithm.k), horizon);
  if (id == "k-clique")
    return extract_schedule(PairLayout::build(config.n, config.algorithm.k), horizon);
  if (id == "k-subsets")
    return extract_schedule(ThreadLayout::build(config.n, config.algorithm.k), horizon);
  throw EngineError(EngineErrorCode::InvalidConfig, 0,
                    "algorithm " + id + " has no oblivious schedule");
}

ExperimentReport run_simulation(const EngineConfig& config) {
  config.validate();
  Engine engine(config, make_algorithm(config), make_injection_source(config));
  engine.run_to_horizon();
  ExperimentReport report = engine.take_report();
  report.config.algorithm = config.algorithm.id;
  report.config.n = config.n;
  report.config.energy_cap = config.energy_cap;
  report.config.max_rounds = config.max_rounds;
  report.config.rho = config.adversary.rho;
  report.config.beta = config.adversary.beta;
  report.config.adversary = config.adversary.strategy;
  report.config.pattern = config.adversary.pattern;
  report.config.k = config.algorithm.k;
  report.config.seed = config.seed;
  report.config.strict_control_bits = config.strict_control_bits;
  report.config.control_bit_factor = config.control_bit_factor;
  report.config.mbtf_threshold = config.algorithm.mbtf_threshold;
  report.config.use_rrw = config.algorithm.use_rrw;
  return report;
}

}  // namespace macsim
