#include "macsim/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace macsim {

namespace {
const char* feedback_name(FeedbackKind k) {
  switch (k) {
    case FeedbackKind::Silent: return "silent";
    case FeedbackKind::Collision: return "collision";
    case FeedbackKind::Heard: return "heard";
  }
  return "?";
}
}  // namespace

std::string rounds_csv(const ExperimentReport& report) {
  std::string out = "round,total_queued,on_count,feedback,delivered_id,control_bits\n";
  for (const auto& row : report.per_round) {
    out += std::to_string(row.round);
    out += ',';
    out += std::to_string(row.total_queued);
    out += ',';
    out += std::to_string(row.on_count);
    out += ',';
    out += feedback_name(row.feedback);
    out += ',';
    if (row.delivered_id) out += std::to_string(*row.delivered_id);
    out += ',';
    out += std::to_string(row.control_bits);
    out += '\n';
  }
  return out;
}

std::string summary_json(const ExperimentReport& report, const std::vector<BoundCheck>& checks,
                         const AuditResult& audit) {
  using json = nlohmann::ordered_json;
  json j;
  const auto& cfg = report.config;
  j["config"] = {
      {"algorithm", cfg.algorithm},
      {"n", cfg.n},
      {"energy_cap", cfg.energy_cap},
      {"max_rounds", cfg.max_rounds},
      {"rho", cfg.rho.str()},
      {"beta", cfg.beta.str()},
      {"adversary", cfg.adversary},
      {"pattern", cfg.pattern},
      {"k", cfg.k},
      {"seed", cfg.seed},
      {"strict_control_bits", cfg.strict_control_bits},
      {"control_bit_factor", cfg.control_bit_factor},
      {"mbtf_threshold", cfg.mbtf_threshold},
      {"use_rrw", cfg.use_rrw},
  };
  const auto& s = report.summary;
  j["summary"] = {
      {"rounds_executed", s.rounds_executed},
      {"injected", s.injected},
      {"delivered", s.delivered},
      {"undelivered", s.undelivered},
      {"max_queue", s.max_queue},
      {"max_latency_delivered", s.max_latency_delivered},
      {"max_undelivered_age", s.max_undelivered_age},
      {"max_on_count", s.max_on_count},
      {"max_control_bits", s.max_control_bits},
      {"max_hop_count", s.max_hop_count},
      {"light_rounds", s.light_rounds},
      {"collision_rounds", s.collision_rounds},
  };
  j["bounds"] = json::array();
  for (const auto& c : checks) {
    j["bounds"].push_back({
        {"name", c.name},
        {"applicable", c.applicable},
        {"advisory", c.advisory},
        {"bound", c.bound.str()},
        {"observed", c.observed},
        {"verdict", verdict_name(c.verdict)},
        {"note", c.note},
    });
  }
  j["audit"] = {
      {"pass", audit.pass},
      {"detail", audit.detail},
  };
  if (audit.first_violation) j["audit"]["first_violation"] = *audit.first_violation;
  return j.dump(2) + "\n";
}

std::string trace_csv(const InjectionTrace& trace) {
  std::string out = "round,station,destination\n";
  for (Round r = 1; r <= trace.horizon; ++r)
    for (const auto& inj : trace.per_round[static_cast<std::size_t>(r - 1)]) {
      out += std::to_string(r);
      out += ',';
      out += std::to_string(inj.station);
      out += ',';
      out += std::to_string(inj.destination);
      out += '\n';
    }
  return out;
}

InjectionTrace parse_trace_csv(const std::string& text) {
  InjectionTrace trace;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("round", 0) == 0) continue;  // header
    }
    std::istringstream ls(line);
    std::string field;
    long long values[3];
    for (int i = 0; i < 3; ++i) {
      if (!std::getline(ls, field, ','))
        throw std::runtime_error("trace line has fewer than 3 fields: " + line);
      values[i] = std::stoll(field);
    }
    Round r = values[0];
    if (r < 1) throw std::runtime_error("trace round index below 1");
    if (r > static_cast<Round>(trace.per_round.size()))
      trace.per_round.resize(static_cast<std::size_t>(r));
    trace.per_round[static_cast<std::size_t>(r - 1)].push_back(
        Injection{static_cast<StationId>(values[1]), static_cast<StationId>(values[2])});
  }
  trace.horizon = static_cast<Round>(trace.per_round.size());
  return trace;
}

InjectionTrace read_trace_csv(const std::string& path) {
  return parse_trace_csv(read_file(path));
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace macsim
