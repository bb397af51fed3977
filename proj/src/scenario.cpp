#include "macsim/scenario.hpp"

#include <set>

#include "json.hpp"
#include "macsim/io.hpp"

namespace macsim {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ScenarioError("unknown key \"" + it.key() + "\" in " + where);
}

Rational parse_rational_field(const json& obj, const std::string& key,
                              const Rational& fallback, bool required) {
  if (!obj.contains(key)) {
    if (required) throw ScenarioError("missing \"" + key + "\"");
    return fallback;
  }
  if (!obj[key].is_string())
    throw ScenarioError("\"" + key + "\" must be a rational string like \"1/2\"");
  auto parsed = Rational::parse(obj[key].get<std::string>());
  if (!parsed)
    throw ScenarioError("cannot parse \"" + key + "\" as p/q: " +
                        obj[key].get<std::string>());
  return *parsed;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"algorithm", "n", "energy_cap", "max_rounds", "rho", "beta",
                     "adversary", "algorithm_params", "seed", "strict_control_bits",
                     "control_bit_factor", "outputs", "record_station_queues"},
                 "scenario");

  Scenario sc;
  auto& cfg = sc.config;
  if (!j.contains("algorithm") || !j["algorithm"].is_string())
    throw ScenarioError("missing algorithm name");
  cfg.algorithm.id = j["algorithm"].get<std::string>();
  if (!j.contains("n")) throw ScenarioError("missing \"n\"");
  cfg.n = j["n"].get<int>();
  if (!j.contains("energy_cap")) throw ScenarioError("missing \"energy_cap\"");
  cfg.energy_cap = j["energy_cap"].get<int>();
  if (!j.contains("max_rounds")) throw ScenarioError("missing \"max_rounds\"");
  cfg.max_rounds = j["max_rounds"].get<long long>();
  cfg.adversary.rho = parse_rational_field(j, "rho", Rational(1), true);
  cfg.adversary.beta = parse_rational_field(j, "beta", Rational(1), false);
  cfg.seed = j.value("seed", 0LL);
  cfg.strict_control_bits = j.value("strict_control_bits", false);
  cfg.control_bit_factor = j.value("control_bit_factor", 4);
  cfg.record_station_queues = j.value("record_station_queues", true);

  if (j.contains("algorithm_params")) {
    const auto& p = j["algorithm_params"];
    reject_unknown(p, {"k", "mbtf_threshold", "use_rrw"}, "algorithm_params");
    cfg.algorithm.k = p.value("k", 0);
    cfg.algorithm.mbtf_threshold = p.value("mbtf_threshold", 0);
    cfg.algorithm.use_rrw = p.value("use_rrw", false);
  }

  if (!j.contains("adversary")) throw ScenarioError("missing \"adversary\"");
  {
    const auto& a = j["adversary"];
    reject_unknown(a, {"strategy", "pattern", "station", "destination", "station_b",
                       "block_length", "trace_file", "injections"},
                   "adversary");
    if (!a.contains("strategy")) throw ScenarioError("missing adversary strategy");
    cfg.adversary.strategy = a["strategy"].get<std::string>();
    cfg.adversary.pattern = a.value("pattern", "round-robin");
    cfg.adversary.station = a.value("station", 0);
    cfg.adversary.destination = a.value("destination", 1);
    cfg.adversary.station_b = a.value("station_b", 0);
    cfg.adversary.block_length = a.value("block_length", 0LL);
    cfg.adversary.trace_file = a.value("trace_file", std::string{});
    if (a.contains("injections")) {
      for (const auto& row : a["injections"]) {
        if (!row.is_array() || row.size() != 3)
          throw ScenarioError("each injection must be [round, station, destination]");
        Round r = row[0].get<long long>();
        if (r < 1) throw ScenarioError("injection round below 1");
        if (r > static_cast<Round>(cfg.adversary.scripted.size()))
          cfg.adversary.scripted.resize(static_cast<std::size_t>(r));
        cfg.adversary.scripted[static_cast<std::size_t>(r - 1)].push_back(
            Injection{row[1].get<int>(), row[2].get<int>()});
      }
    }
  }

  if (j.contains("outputs")) {
    const auto& o = j["outputs"];
    reject_unknown(o, {"rounds_csv", "summary_json"}, "outputs");
    sc.rounds_csv_path = o.value("rounds_csv", std::string{});
    sc.summary_json_path = o.value("summary_json", std::string{});
  }
  return sc;
}

Scenario load_scenario(const std::string& path) { return parse_scenario(read_file(path)); }

std::string scenario_to_json(const Scenario& sc) {
  const auto& cfg = sc.config;
  json j;
  j["algorithm"] = cfg.algorithm.id;
  j["n"] = cfg.n;
  j["energy_cap"] = cfg.energy_cap;
  j["max_rounds"] = cfg.max_rounds;
  j["rho"] = cfg.adversary.rho.str();
  j["beta"] = cfg.adversary.beta.str();
  j["algorithm_params"] = {{"k", cfg.algorithm.k},
                           {"mbtf_threshold", cfg.algorithm.mbtf_threshold},
                           {"use_rrw", cfg.algorithm.use_rrw}};
  json a;
  a["strategy"] = cfg.adversary.strategy;
  a["pattern"] = cfg.adversary.pattern;
  a["station"] = cfg.adversary.station;
  a["destination"] = cfg.adversary.destination;
  a["station_b"] = cfg.adversary.station_b;
  a["block_length"] = cfg.adversary.block_length;
  if (!cfg.adversary.trace_file.empty()) a["trace_file"] = cfg.adversary.trace_file;
  if (!cfg.adversary.scripted.empty()) {
    json rows = json::array();
    for (std::size_t r = 0; r < cfg.adversary.scripted.size(); ++r)
      for (const auto& inj : cfg.adversary.scripted[r])
        rows.push_back({static_cast<long long>(r + 1), inj.station, inj.destination});
    a["injections"] = rows;
  }
  j["adversary"] = a;
  j["seed"] = cfg.seed;
  j["strict_control_bits"] = cfg.strict_control_bits;
  j["control_bit_factor"] = cfg.control_bit_factor;
  j["record_station_queues"] = cfg.record_station_queues;
  json o;
  o["rounds_csv"] = sc.rounds_csv_path;
  o["summary_json"] = sc.summary_json_path;
  j["outputs"] = o;
  return j.dump(2) + "\n";
}

}  // namespace macsim
