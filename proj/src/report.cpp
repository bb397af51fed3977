#include "macsim/report.hpp"

#include <map>

namespace macsim {

AuditResult conservation_audit(const ExperimentReport& report) {
  AuditResult result;

  std::map<Round, long long> injected_at, delivered_at;
  for (const auto& p : report.per_packet) {
    ++injected_at[p.injection_round];
    if (p.delivery_round) ++delivered_at[*p.delivery_round];
    if (p.delivery_round && *p.delivery_round < p.injection_round) {
      result.pass = false;
      result.first_violation = *p.delivery_round;
      result.detail = "packet " + std::to_string(p.id) + " delivered before its injection";
      return result;
    }
  }

  // Prefix conservation at every executed round: injected == delivered + queued.
  long long injected = 0, delivered = 0;
  for (const auto& row : report.per_round) {
    auto it = injected_at.find(row.round);
    long long inj_here = it != injected_at.end() ? it->second : 0;
    if (row.injected != inj_here) {
      result.pass = false;
      result.first_violation = row.round;
      result.detail = "per-round injection count disagrees with the packet table";
      return result;
    }
    injected += inj_here;
    auto dt = delivered_at.find(row.round);
    delivered += dt != delivered_at.end() ? dt->second : 0;
    if (injected != delivered + row.total_queued) {
      result.pass = false;
      result.first_violation = row.round;
      result.detail = "injected != delivered + queued";
      return result;
    }
    if (!row.per_station_queues.empty()) {
      long long sum = 0;
      for (auto q : row.per_station_queues) sum += q;
      if (sum != row.total_queued) {
        result.pass = false;
        result.first_violation = row.round;
        result.detail = "per-station queues do not sum to the total";
        return result;
      }
    }
  }

  result.detail = "ok";
  return result;
}

}  // namespace macsim
