// Command-line front end. Talks to the simulator only through aircomp.h.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aircomp/aircomp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(int status) {
  switch (status) {
    case AIRCOMP_OK: return kExitOk;
    case AIRCOMP_E_INVALID_ARGUMENT:
    case AIRCOMP_E_PARSE:
    case AIRCOMP_E_VALIDATION:
    case AIRCOMP_E_MISSING_COLUMN:
      return kExitValidation;
    default: return kExitRuntime;
  }
}

int report(int status, const char* what) {
  if (status != AIRCOMP_OK)
    std::fprintf(stderr, "aircomp %s: %s: %s\n", what, aircomp_status_name(status), aircomp_last_error());
  return exit_code_for(status);
}

struct RunArgs {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  unsigned threads = 0;
  bool event_log = false;
  bool records = false;
  bool hook_stdio = false;
};

int execute(const RunArgs& args, bool sweep) {
  const char* what = sweep ? "sweep" : "run";
  aircomp_scenario_t* scenario = nullptr;
  int rc = aircomp_scenario_load_file(args.scenario.c_str(), &scenario);
  if (rc != AIRCOMP_OK) return report(rc, what);
  if (args.seed) rc = aircomp_scenario_set_seed(scenario, *args.seed);
  if (rc == AIRCOMP_OK && args.repeats) rc = aircomp_scenario_set_repeats(scenario, *args.repeats);
  if (rc != AIRCOMP_OK) {
    aircomp_scenario_destroy(scenario);
    return report(rc, what);
  }

  std::error_code ec;
  std::filesystem::create_directories(args.out, ec);
  if (ec) {
    aircomp_scenario_destroy(scenario);
    std::fprintf(stderr, "aircomp %s: cannot create %s: %s\n", what, args.out.c_str(), ec.message().c_str());
    return kExitRuntime;
  }
  const std::string events_dir = (std::filesystem::path(args.out) / "events").string();

  aircomp_run_options opts;
  aircomp_run_options_init(&opts);
  opts.threads = args.threads;
  opts.hook_stdio = args.hook_stdio;
  if (args.event_log) opts.event_log_dir = events_dir.c_str();
  if (args.records) opts.records_dir = args.out.c_str();

  aircomp_results_t* results = nullptr;
  rc = sweep ? aircomp_sweep(scenario, &opts, &results) : aircomp_run(scenario, &opts, &results);
  aircomp_scenario_destroy(scenario);
  if (rc != AIRCOMP_OK) return report(rc, what);

  const std::string csv = (std::filesystem::path(args.out) / "metrics.csv").string();
  rc = aircomp_results_write_csv(results, csv.c_str());
  std::uint64_t violations = 0;
  if (rc == AIRCOMP_OK) rc = aircomp_results_position_violations(results, &violations);
  aircomp_results_destroy(results);
  if (rc != AIRCOMP_OK) return report(rc, what);
  if (violations) std::fprintf(stderr, "aircomp %s: warning: %llu position-bound violations\n", what,
                               static_cast<unsigned long long>(violations));
  if (!args.hook_stdio) std::printf("wrote %s\n", csv.c_str());
  return kExitOk;
}

void add_run_options(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", args.out, "Output directory")->required();
  cmd->add_option("--seed", args.seed, "Override the root seed");
  cmd->add_option("--repeats", args.repeats, "Override the repeat count")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", args.threads, "Worker threads (0 = all cores)");
  cmd->add_flag("--event-log", args.event_log, "Write per-run event logs under OUT/events");
  cmd->add_flag("--records", args.records, "Write raw tasks.csv/servers.csv for verify");
  cmd->add_flag("--hook-stdio", args.hook_stdio, "Exchange observations and actions over stdin/stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Air computing simulator"};
  app.require_subcommand(1);

  RunArgs run_args, sweep_args;
  auto* run = app.add_subcommand("run", "Run the base configuration");
  add_run_options(run, run_args);
  auto* sweep = app.add_subcommand("sweep", "Run every configuration of the scenario's sweep");
  add_run_options(sweep, sweep_args);

  std::string plot_csv, plot_out;
  auto* plot = app.add_subcommand("plot", "Render SVG figures from a metrics CSV");
  plot->add_option("--csv", plot_csv, "Metrics CSV")->required();
  plot->add_option("--out", plot_out, "Output directory")->required();

  std::string verify_csv;
  auto* verify = app.add_subcommand("verify", "Recompute a metrics CSV from its raw records");
  verify->add_option("--csv", verify_csv, "Metrics CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*run) return execute(run_args, false);
  if (*sweep) return execute(sweep_args, true);
  if (*plot) {
    const int rc = aircomp_plot(plot_csv.c_str(), plot_out.c_str());
    if (rc == AIRCOMP_OK) std::printf("wrote figures to %s\n", plot_out.c_str());
    return report(rc, "plot");
  }
  std::size_t rows = 0, tasks = 0;
  const int rc = aircomp_verify(verify_csv.c_str(), &rows, &tasks);
  if (rc == AIRCOMP_OK) std::printf("verified %zu rows against %zu task records\n", rows, tasks);
  return report(rc, "verify");
}
