#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "crdtcheck/checker.hpp"
#include "crdtcheck/errors.hpp"
#include "crdtcheck/trace.hpp"

namespace {

crdtcheck::ReportFormat parse_format(const std::string& name) {
  return name == "json" ? crdtcheck::ReportFormat::json : crdtcheck::ReportFormat::text;
}

int emit(const crdtcheck::Report& report, crdtcheck::ReportFormat format) {
  std::cout << crdtcheck::render_report(report, format);
  return crdtcheck::exit_code(report.verdict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crdtcheck: simulate, replay, and brute-force-check replicated datatypes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string report_format = "text";
  app.add_option("--report", report_format, "Report rendering: text or json")
      ->check(CLI::IsMember({"text", "json"}));

  // fuzz
  auto* fuzz = app.add_subcommand("fuzz", "Run one seeded random schedule and audit it");
  std::string fuzz_datatype;
  crdtcheck::Scenario scenario;
  std::string emit_trace_path;
  fuzz->add_option("--datatype", fuzz_datatype, "counter, orset, or rga")->required();
  fuzz->add_option("--nodes", scenario.nodes, "Replica count (default 3)");
  fuzz->add_option("--ops", scenario.op_budget, "Broadcast budget (default 20)");
  auto* seed_opt = fuzz->add_option("--seed", scenario.seed,
                                    "Schedule seed (default $CRDTCHECK_SEED, else 0)");
  fuzz->add_option("--drop-rate", scenario.faults.drop, "Per-step drop probability");
  fuzz->add_option("--crash-rate", scenario.faults.crash, "Per-step crash probability");
  fuzz->add_option("--partition-rate", scenario.faults.partition,
                   "Per-step partition toggle probability");
  fuzz->add_option("--emit-trace", emit_trace_path,
                   "Write the executed schedule as a JSONL trace");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-execute a recorded schedule and audit it");
  std::string trace_path;
  std::vector<std::string> log_paths;
  auto* trace_opt = replay->add_option("--trace", trace_path, "JSONL trace file");
  auto* logs_opt = replay->add_option("--logs", log_paths,
                                      "Per-node event logs, one per replica, in node order");
  trace_opt->excludes(logs_opt);

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "Enumerate every causality-respecting delivery order of a message set");
  std::string oracle_datatype;
  std::string spec_path;
  std::size_t bound = 7;
  oracle->add_option("--datatype", oracle_datatype, "counter, orset, or rga")->required();
  oracle->add_option("--spec", spec_path, "Oracle problem file (JSON)")->required();
  oracle->add_option("--bound", bound, "Maximum message count to enumerate (default 7)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  const crdtcheck::ReportFormat format = parse_format(report_format);

  try {
    if (*fuzz) {
      scenario.datatype = crdtcheck::parse_datatype(fuzz_datatype);
      if (seed_opt->count() == 0) {
        if (const char* env = std::getenv("CRDTCHECK_SEED")) {
          scenario.seed = std::stoull(env);
        }
      }
      crdtcheck::validate_scenario(scenario);
      crdtcheck::Trace trace;
      crdtcheck::Report report = crdtcheck::run_fuzz(scenario, &trace);
      if (!emit_trace_path.empty()) crdtcheck::save_trace(trace, emit_trace_path);
      return emit(report, format);
    }
    if (*replay) {
      if (trace_opt->count() == 0 && logs_opt->count() == 0) {
        std::cerr << "replay needs --trace or --logs\n";
        return 3;
      }
      crdtcheck::Report report = trace_opt->count()
                                     ? crdtcheck::replay_trace_file(trace_path)
                                     : crdtcheck::replay_logs(log_paths);
      return emit(report, format);
    }
    if (*oracle) {
      const auto datatype = crdtcheck::parse_datatype(oracle_datatype);
      const auto spec = crdtcheck::parse_oracle_spec(crdtcheck::read_file(spec_path),
                                                     datatype, bound);
      return emit(crdtcheck::brute_force_convergence(spec), format);
    }
  } catch (const crdtcheck::BoundExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const crdtcheck::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const crdtcheck::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const crdtcheck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
