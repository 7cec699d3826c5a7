// shasta-pca: command-line front end for experiments, dataset checks,
// timing comparisons and checkpoint inspection.

#include "shasta/checkpoint.hpp"
#include "shasta/config.hpp"
#include "shasta/csv.hpp"
#include "shasta/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace {

using nlohmann::json;

int fail(const std::string& kind, const std::string& message, json extra = json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  std::cerr << extra.dump() << '\n';
  return 1;
}

int cmd_run(const std::string& path, const std::string& out_dir) {
  auto cfg = shasta::load_config(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const auto result = shasta::run_experiment(cfg);
  std::cout << result.summary_json << '\n';
  return 0;
}

int cmd_timing(const std::string& path, const std::string& out_dir) {
  auto cfg = shasta::load_config(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const auto result = shasta::timing_run(cfg);
  std::cout << result.table();
  return 0;
}

int cmd_ingest_check(const std::string& path) {
  const auto s = shasta::inspect_csv(path);
  json counts = json::object();
  for (std::size_t l = 0; l < s.group_counts.size(); ++l) {
    counts[std::to_string(l + 1)] = s.group_counts[l];
  }
  std::cout << json{{"rows", s.rows},
                    {"d", s.d},
                    {"group_counts", counts},
                    {"empty_rows", s.empty_rows},
                    {"mean_observed", s.mean_observed},
                    {"has_variance", s.has_variance}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_state_dump(const std::string& path, bool full) {
  std::cout << shasta::state_to_json(shasta::load_state(path), full) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming heteroscedastic PCA experiments"};
  app.require_subcommand(1);

  std::string config_path, csv_path, state_path, out_dir;
  bool full = false;

  auto* run = app.add_subcommand("run", "Run every estimator in a config over all seeds");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("-o,--output", out_dir, "Override the output directory");

  auto* check = app.add_subcommand("ingest-check", "Validate a sample CSV and summarize it");
  check->add_option("csv", csv_path, "Sample CSV")->required();

  auto* timing = app.add_subcommand("timing", "Compare a streaming and a batch estimator by wall clock");
  timing->add_option("config", config_path, "Experiment config (JSON)")->required();
  timing->add_option("-o,--output", out_dir, "Override the output directory");

  auto* dump = app.add_subcommand("state-dump", "Print a saved estimator state as JSON");
  dump->add_option("checkpoint", state_path, "Checkpoint file")->required();
  dump->add_flag("--full", full, "Include the sufficient statistics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*check) return cmd_ingest_check(csv_path);
    if (*timing) return cmd_timing(config_path, out_dir);
    return cmd_state_dump(state_path, full);
  } catch (const shasta::ConfigError& e) {
    return fail("config", e.what(), {{"path", e.path()}});
  } catch (const shasta::CsvError& e) {
    return fail("csv", e.what(), {{"line", e.line()}});
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
}
