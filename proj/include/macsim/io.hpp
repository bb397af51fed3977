#pragma once

#include <string>
#include <vector>

#include "macsim/adversary.hpp"
#include "macsim/metrics.hpp"
#include "macsim/report.hpp"

namespace macsim {

/// Per-round trace, one line per executed round. Byte-stable for a fixed
/// config.
std::string rounds_csv(const ExperimentReport& report);

/// Run summary with config echo, aggregate figures, the bound-check table and
/// the conservation audit. Byte-stable for a fixed config.
std::string summary_json(const ExperimentReport& report, const std::vector<BoundCheck>& checks,
                         const AuditResult& audit);

/// Injection trace as `round,station,destination` rows.
std::string trace_csv(const InjectionTrace& trace);
InjectionTrace parse_trace_csv(const std::string& text);
InjectionTrace read_trace_csv(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace macsim
