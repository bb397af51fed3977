#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macsim/engine.hpp"
#include "macsim/io.hpp"
#include "macsim/k_clique.hpp"
#include "macsim/k_cycle.hpp"
#include "macsim/k_subsets.hpp"
#include "macsim/metrics.hpp"
#include "macsim/oblivious.hpp"
#include "macsim/scenario.hpp"

namespace {

using namespace macsim;

int lg_ceil(int x) {
  int v = 0;
  while ((1 << v) < x + 1) ++v;
  return v;
}

/// Runs one scenario: simulation, bound checks, audit, outputs. Returns the
/// process exit code.
int run_one(const Scenario& scenario, const std::string& csv_override,
            const std::string& summary_override) {
  ExperimentReport report = run_simulation(scenario.config);
  auto checks = evaluate_bounds(report);
  if (scenario.config.strict_control_bits) {
    BoundCheck strict;
    strict.name = "control-bit-budget";
    strict.applicable = true;
    strict.bound = Rational(scenario.config.control_bit_factor * lg_ceil(scenario.config.n));
    strict.observed = report.summary.max_control_bits;
    strict.verdict =
        Rational(strict.observed) <= strict.bound ? Verdict::Pass : Verdict::Fail;
    checks.push_back(strict);
  }
  auto audit = conservation_audit(report);

  std::string csv_path = csv_override.empty() ? scenario.rounds_csv_path : csv_override;
  std::string summary_path =
      summary_override.empty() ? scenario.summary_json_path : summary_override;
  if (!csv_path.empty()) write_file(csv_path, rounds_csv(report));
  if (!summary_path.empty()) write_file(summary_path, summary_json(report, checks, audit));

  for (const auto& c : checks) {
    std::cout << c.name << ": " << verdict_name(c.verdict);
    if (c.applicable)
      std::cout << " (observed " << c.observed << ", bound " << c.bound.str() << ")";
    if (c.advisory) std::cout << " [advisory]";
    std::cout << "\n";
  }
  std::cout << "audit: " << (audit.pass ? "pass" : "fail") << "\n";
  std::cout << "summary: injected=" << report.summary.injected
            << " delivered=" << report.summary.delivered
            << " max_queue=" << report.summary.max_queue
            << " max_latency=" << report.summary.max_latency_delivered
            << " max_on=" << report.summary.max_on_count << "\n";
  return all_checks_pass(checks) && audit.pass ? 0 : 1;
}

std::string with_rho_suffix(const std::string& path, const Rational& rho) {
  if (path.empty()) return path;
  std::string tag = rho.str();
  for (auto& c : tag)
    if (c == '/') c = '-';
  auto dot = path.rfind('.');
  if (dot == std::string::npos) return path + "_" + tag;
  return path.substr(0, dot) + "_" + tag + path.substr(dot);
}

int print_layout(const std::string& algorithm, int n, int k) {
  if (algorithm == "k-cycle") {
    auto layout = GroupLayout::build(n, k);
    std::cout << "k-cycle n=" << n << " k=" << k << " effective_k=" << layout.effective_k
              << " delta=" << layout.delta << " groups=" << layout.group_count()
              << " max_on=" << layout.max_on << "\n";
    for (int g = 0; g < layout.group_count(); ++g) {
      std::cout << "group " << g << ":";
      for (StationId s : layout.groups[static_cast<std::size_t>(g)]) std::cout << " " << s;
      std::cout << " -> connector " << layout.outbound_connector[static_cast<std::size_t>(g)]
                << "\n";
    }
    return 0;
  }
  if (algorithm == "k-clique") {
    auto layout = PairLayout::build(n, k);
    std::cout << "k-clique n=" << n << " k=" << k << " effective_k=" << layout.effective_k
              << " sets=" << layout.set_count << " set_size=" << layout.set_size
              << " pairs=" << layout.pair_count() << "\n";
    for (int p = 0; p < layout.pair_count(); ++p) {
      auto [a, b] = layout.pairs[static_cast<std::size_t>(p)];
      std::cout << "pair " << p << ": sets (" << a << "," << b << ") stations";
      for (StationId s : layout.members_of(p)) std::cout << " " << s;
      std::cout << "\n";
    }
    return 0;
  }
  if (algorithm == "k-subsets") {
    auto layout = ThreadLayout::build(n, k);
    std::cout << "k-subsets n=" << n << " k=" << k << " gamma=" << layout.gamma << "\n";
    for (std::size_t t = 0; t < layout.subsets.size(); ++t) {
      std::cout << "thread " << t << ":";
      for (StationId s : layout.subsets[t]) std::cout << " " << s;
      std::cout << "\n";
    }
    return 0;
  }
  std::cerr << "unknown layout algorithm: " << algorithm << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"macsim: adversarial routing on an energy-capped shared channel"};
  app.require_subcommand(1);

  std::string scenario_path, csv_path, summary_path;
  auto* run = app.add_subcommand("run", "execute one scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON path")->required();
  run->add_option("--rounds-csv", csv_path, "override the per-round CSV path");
  run->add_option("--summary", summary_path, "override the summary JSON path");

  std::vector<std::string> sweep_rhos;
  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "run a scenario across injection rates");
  sweep->add_option("scenario", sweep_path, "scenario JSON path")->required();
  sweep->add_option("--rho", sweep_rhos, "rates p/q to sweep")->required();

  std::string layout_algo;
  int layout_n = 0, layout_k = 0;
  auto* layout = app.add_subcommand("layout", "print an on/off layout");
  layout->add_option("algorithm", layout_algo, "k-cycle | k-clique | k-subsets")->required();
  layout->add_option("--n", layout_n, "station count")->required();
  layout->add_option("--k", layout_k, "cap parameter")->required();

  std::string witness_algo, witness_rho = "1/2", witness_beta = "1", witness_out;
  int witness_n = 0, witness_k = 0;
  long long witness_t = 1000;
  auto* witness = app.add_subcommand("witness", "emit a lower-bound injection trace");
  witness->add_option("algorithm", witness_algo, "k-cycle | k-clique | k-subsets")->required();
  witness->add_option("--n", witness_n)->required();
  witness->add_option("--k", witness_k)->required();
  witness->add_option("--rho", witness_rho, "injection rate p/q");
  witness->add_option("--beta", witness_beta, "burstiness coefficient p/q");
  witness->add_option("--t", witness_t, "interval length");
  witness->add_option("--out", witness_out, "trace CSV output path");
  bool witness_pair = false;
  witness->add_flag("--pair", witness_pair, "use the ordered-pair argument");

  std::string trace_path, trace_rho, trace_beta = "1";
  auto* validate = app.add_subcommand("validate-trace", "check a trace against (rho, beta)");
  validate->add_option("trace", trace_path, "trace CSV path")->required();
  validate->add_option("--rho", trace_rho, "injection rate p/q")->required();
  validate->add_option("--beta", trace_beta, "burstiness coefficient p/q");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_one(load_scenario(scenario_path), csv_path, summary_path);

    if (*sweep) {
      Scenario base = load_scenario(sweep_path);
      int worst = 0;
      for (const auto& rho_text : sweep_rhos) {
        auto rho = Rational::parse(rho_text);
        if (!rho) {
          std::cerr << "bad rate: " << rho_text << "\n";
          return 2;
        }
        Scenario sc = base;
        sc.config.adversary.rho = *rho;
        sc.rounds_csv_path = with_rho_suffix(base.rounds_csv_path, *rho);
        sc.summary_json_path = with_rho_suffix(base.summary_json_path, *rho);
        std::cout << "== rho " << rho->str() << " ==\n";
        worst = std::max(worst, run_one(sc, "", ""));
      }
      return worst;
    }

    if (*layout) return print_layout(layout_algo, layout_n, layout_k);

    if (*witness) {
      auto rho = Rational::parse(witness_rho);
      auto beta = Rational::parse(witness_beta);
      if (!rho || !beta) {
        std::cerr << "rates must be rational strings like 1/2\n";
        return 2;
      }
      EngineConfig cfg;
      cfg.n = witness_n;
      cfg.energy_cap = witness_n - 1;
      cfg.max_rounds = witness_t;
      cfg.algorithm.id = witness_algo;
      cfg.algorithm.k = witness_k;
      ObliviousSchedule sched = extract_oblivious_schedule(cfg, witness_t);
      AdversaryType adv{*rho, *beta};
      InjectionTrace trace;
      if (witness_pair) {
        auto w = oblivious_pair_witness(sched, adv, witness_t);
        std::cout << "pair witness (" << w.from << "," << w.to << ") jointly on "
                  << w.joint_on_rounds << " of " << witness_t << " rounds; residual bound "
                  << w.residual_bound.str() << "\n";
        trace = std::move(w.trace);
      } else {
        auto w = oblivious_station_witness(sched, adv, witness_t);
        std::cout << "station witness " << w.station << " on " << w.on_rounds << " of "
                  << witness_t << " rounds; residual bound " << w.residual_bound.str()
                  << "\n";
        trace = std::move(w.trace);
      }
      if (!witness_out.empty()) write_file(witness_out, trace_csv(trace));
      return 0;
    }

    if (*validate) {
      auto rho = Rational::parse(trace_rho);
      auto beta = Rational::parse(trace_beta);
      if (!rho || !beta) {
        std::cerr << "rates must be rational strings like 1/2\n";
        return 2;
      }
      auto trace = read_trace_csv(trace_path);
      auto result = validate_trace(trace, AdversaryType{*rho, *beta});
      if (result.pass) {
        std::cout << "admissible: " << trace.total_packets() << " packets over "
                  << trace.horizon << " rounds\n";
        return 0;
      }
      const auto& v = *result.violation;
      std::cout << "violation: interval [" << v.interval_start << "," << v.interval_end
                << "] holds " << v.count << " packets, allowed " << v.allowed.str() << "\n";
      return 1;
    }
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const EngineError& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return 1;
  } catch (const RateTooLow& e) {
    std::cerr << "rate too low: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
