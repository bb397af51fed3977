#pragma once

#include <string>
#include <vector>

#include "macsim/engine.hpp"
#include "macsim/rational.hpp"
#include "macsim/report.hpp"

namespace macsim {

enum class Verdict { Pass, Fail, NotApplicable };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

/// One worst-case guarantee evaluated against a finished run. Bound values
/// are exact rationals; observations are integers; an advisory check is
/// reported but never fails a run.
struct BoundCheck {
  std::string name;
  bool applicable = true;
  bool advisory = false;
  Rational bound{0};
  long long observed = 0;
  Verdict verdict = Verdict::NotApplicable;
  std::string note;
};

/// Evaluates every guarantee applicable to the report's algorithm and rate:
/// queue ceilings, latency ceilings, the energy cap, the plain-packet bit
/// audit and the direct-routing hop audit.
std::vector<BoundCheck> evaluate_bounds(const ExperimentReport& report);

/// True when every applicable non-advisory check passed.
bool all_checks_pass(const std::vector<BoundCheck>& checks);

/// Queue ceiling for the season-structured rate-1 algorithm.
BoundCheck orchestra_queue_bound_check(const ExperimentReport& report);

enum class StabilityVerdict { Bounded, Growing };

inline const char* stability_name(StabilityVerdict v) {
  return v == StabilityVerdict::Growing ? "growing" : "bounded";
}

/// Runs the config at horizons T, 2T and 4T; reports Growing when the peak
/// queue rises by at least `factor` across both consecutive horizon pairs.
StabilityVerdict stability_probe(const EngineConfig& base, Round t,
                                 const Rational& factor = Rational(3, 2));

}  // namespace macsim
