#include "macsim/metrics.hpp"

#include <algorithm>

namespace macsim {

namespace {

BoundCheck make_check(std::string name, bool applicable, Rational bound, long long observed,
                      bool advisory = false, std::string note = {}) {
  BoundCheck c;
  c.name = std::move(name);
  c.applicable = applicable;
  c.advisory = advisory;
  c.bound = bound;
  c.observed = observed;
  c.note = std::move(note);
  if (!applicable)
    c.verdict = Verdict::NotApplicable;
  else
    c.verdict = Rational(observed) <= bound ? Verdict::Pass : Verdict::Fail;
  return c;
}

long long lg_ceil(long long x) {
  long long v = 0;
  while ((1LL << v) < x + 1) ++v;
  return v;
}

}  // namespace

BoundCheck orchestra_queue_bound_check(const ExperimentReport& report) {
  const auto& cfg = report.config;
  Rational bound = Rational(2LL * cfg.n * cfg.n * cfg.n) + cfg.beta;
  return make_check("orchestra-queue-bound", cfg.rho <= Rational(1), bound,
                    report.summary.max_queue);
}

std::vector<BoundCheck> evaluate_bounds(const ExperimentReport& report) {
  std::vector<BoundCheck> checks;
  const auto& cfg = report.config;
  const auto& sum = report.summary;
  const Rational one(1);
  const long long n = cfg.n;

  checks.push_back(make_check("energy-cap", true, Rational(cfg.energy_cap),
                              sum.max_on_count));

  if (cfg.algorithm == "orchestra") {
    checks.push_back(orchestra_queue_bound_check(report));
    checks.push_back(make_check("direct-routing", true, Rational(1), sum.max_hop_count));
  } else if (cfg.algorithm == "count-hop") {
    bool applicable = cfg.rho < one;
    Rational bound =
        applicable ? Rational(2) * (Rational(n * n) + cfg.beta) / (one - cfg.rho)
                   : Rational(0);
    checks.push_back(make_check("count-hop-latency", applicable, bound,
                                sum.max_latency_delivered));
    checks.push_back(make_check("count-hop-undelivered-age", applicable, bound,
                                sum.max_undelivered_age, true,
                                "age of still-queued packets at the horizon"));
    checks.push_back(make_check("direct-routing", true, Rational(1), sum.max_hop_count));
  } else if (cfg.algorithm == "adjust-window") {
    bool applicable = cfg.rho < one;
    long long lgn = lg_ceil(n);
    Rational bound = applicable
                         ? (Rational(18 * n * n * n * lgn * lgn) + Rational(2) * cfg.beta) /
                               (one - cfg.rho)
                         : Rational(0);
    checks.push_back(make_check("adjust-window-latency", applicable, bound,
                                sum.max_latency_delivered, true,
                                "holds for sufficiently large systems"));
    checks.push_back(make_check("plain-packet", true, Rational(0), sum.max_control_bits));
  } else if (cfg.algorithm == "k-cycle") {
    const long long k = cfg.k;
    bool applicable = cfg.rho < Rational(k - 1, n - 1);
    Rational bound = (Rational(32) + cfg.beta) * Rational(n);
    checks.push_back(make_check("k-cycle-latency", applicable, bound,
                                sum.max_latency_delivered));
    checks.push_back(make_check("plain-packet", true, Rational(0), sum.max_control_bits));
  } else if (cfg.algorithm == "k-clique") {
    const long long k = cfg.k;
    bool applicable = cfg.rho <= Rational(k * k, 2 * n * (2 * n - k));
    Rational bound = Rational(4 * n * n) * (Rational(2) * Rational(k) + cfg.beta) /
                     Rational(k * k);
    checks.push_back(make_check("k-clique-latency", applicable, bound,
                                sum.max_latency_delivered));
    checks.push_back(make_check("plain-packet", true, Rational(0), sum.max_control_bits));
    checks.push_back(make_check("direct-routing", true, Rational(1), sum.max_hop_count));
  } else if (cfg.algorithm == "k-subsets") {
    const long long k = cfg.k;
    bool applicable = cfg.rho <= Rational(k * (k - 1), n * (n - 1));
    long long gamma = 1;
    for (long long i = 1; i <= k; ++i) gamma = gamma * (n - k + i) / i;
    Rational bound = Rational(2 * gamma) * (Rational(n * n) + cfg.beta);
    checks.push_back(make_check("k-subsets-queue-bound", applicable, bound, sum.max_queue));
    checks.push_back(make_check("direct-routing", true, Rational(1), sum.max_hop_count));
  }

  return checks;
}

bool all_checks_pass(const std::vector<BoundCheck>& checks) {
  for (const auto& c : checks)
    if (!c.advisory && c.verdict == Verdict::Fail) return false;
  return true;
}

StabilityVerdict stability_probe(const EngineConfig& base, Round t, const Rational& factor) {
  long long peaks[3];
  for (int i = 0; i < 3; ++i) {
    EngineConfig cfg = base;
    cfg.max_rounds = t << i;
    cfg.record_station_queues = false;
    peaks[i] = run_simulation(cfg).summary.max_queue;
  }
  auto grew = [&](long long a, long long b) {
    return b > a && Rational(b) >= factor * Rational(a);
  };
  return grew(peaks[0], peaks[1]) && grew(peaks[1], peaks[2]) ? StabilityVerdict::Growing
                                                              : StabilityVerdict::Bounded;
}

}  // namespace macsim
