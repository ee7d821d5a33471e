#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "uqbench/bench.hpp"
#include "uqbench/synth.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 1 config error, 2 partial run with missing cells.
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& seed_override, int jobs) {
  uqbench::BenchmarkConfig config;
  try {
    config = uqbench::BenchmarkConfig::from_file(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (!seed_override.empty()) {
      config.seeds.clear();
      std::stringstream ss(seed_override);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        config.seeds.push_back(std::stoull(tok));
      }
    }
    if (jobs > 0) config.jobs = jobs;
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  uqbench::BenchmarkReport report = uqbench::run_benchmark(config);

  fs::create_directories(config.output_dir);
  const fs::path dir(config.output_dir);
  uqbench::emit_markdown(report, (dir / "report.md").string());
  uqbench::emit_csv(report, (dir / "results.csv").string());
  uqbench::emit_json(report, (dir / "report.json").string());
  std::cout << "wrote " << (dir / "report.md").string() << ", results.csv, "
            << "report.json\n";
  if (report.missing_count > 0) {
    std::cout << "partial run: " << report.missing_count
              << " missing cell(s)\n";
    return kPartial;
  }
  return kOk;
}

int cmd_task(const std::string& config_path, const std::string& dataset,
             std::uint64_t seed, const std::string& model,
             const std::string& scorer, const std::string& task,
             const std::string& dump_scores) {
  uqbench::BenchmarkConfig config;
  try {
    config = uqbench::BenchmarkConfig::from_file(config_path);
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  uqbench::TaskResult r = uqbench::run_single_cell(config, dataset, seed,
                                                   model, scorer, task,
                                                   dump_scores);
  if (r.missing) {
    std::cout << dataset << " seed=" << seed << " " << model << " " << scorer
              << " " << task << ": missing\n";
    return kPartial;
  }
  std::printf("%s seed=%llu %s %s %s: %.6f\n", dataset.c_str(),
              static_cast<unsigned long long>(seed), model.c_str(),
              scorer.c_str(), task.c_str(), r.value);
  return kOk;
}

int cmd_report(const std::string& json_path, const std::string& out_dir,
               const std::string& formats) {
  uqbench::BenchmarkReport report;
  try {
    report = uqbench::load_report_json(json_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  if (formats.find("markdown") != std::string::npos ||
      formats.find("md") != std::string::npos) {
    uqbench::emit_markdown(report, (dir / "report.md").string());
  }
  if (formats.find("csv") != std::string::npos) {
    uqbench::emit_csv(report, (dir / "results.csv").string());
  }
  if (formats.find("json") != std::string::npos) {
    uqbench::emit_json(report, (dir / "report.json").string());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UQ downstream-task benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seeds, dataset, model, scorer, task;
  std::string json_path, formats = "markdown,csv,json", dump_scores;
  std::string synth_out = "synthetic_adult.csv";
  std::uint64_t seed = 0;
  std::size_t synth_rows = 8000;
  int jobs = 0;

  CLI::App* run = app.add_subcommand("run", "Run the full benchmark");
  run->add_option("--config", config_path, "Config file (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_option("--seeds", seeds, "Comma-separated seed override");
  run->add_option("--jobs", jobs, "Parallel (dataset x seed) workers");

  CLI::App* tsk = app.add_subcommand("task", "Evaluate a single cell");
  tsk->add_option("--config", config_path, "Config file (JSON)")->required();
  tsk->add_option("--dataset", dataset, "Dataset name")->required();
  tsk->add_option("--seed", seed, "Seed")->required();
  tsk->add_option("--model", model, "Model name")->required();
  tsk->add_option("--scorer", scorer, "Scorer name")->required();
  tsk->add_option("--task", task, "Task name")->required();
  tsk->add_option("--dump-scores", dump_scores,
                  "Write per-sample scores to this CSV file");

  CLI::App* rep = app.add_subcommand("report", "Re-render from stored JSON");
  rep->add_option("--json", json_path, "report.json path")->required();
  rep->add_option("--out", out_dir, "Output directory")->required();
  rep->add_option("--formats", formats, "Comma-separated: markdown,csv,json");

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate the synthetic census-style example dataset");
  synth->add_option("--out", synth_out, "Output CSV path");
  synth->add_option("--rows", synth_rows, "Number of rows");
  synth->add_option("--seed", seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, seeds, jobs);
    if (tsk->parsed()) {
      return cmd_task(config_path, dataset, seed, model, scorer, task,
                      dump_scores);
    }
    if (rep->parsed()) return cmd_report(json_path, out_dir, formats);
    if (synth->parsed()) {
      uqbench::TabularDataset data =
          uqbench::make_synthetic_adult(synth_rows, seed);
      uqbench::write_csv(data, synth_out);
      std::cout << "wrote " << synth_out << " (" << data.n_rows()
                << " rows)\n";
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
