#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "uqbench/csv.hpp"
#include "uqbench/splits.hpp"
#include "uqbench/tasks.hpp"

namespace uqbench {

inline const std::vector<std::string> kTaskOrder = {
    "retention", "error_detection", "ood_detection", "shift_detection",
    "perf_drop"};

// Error-based tasks depend on the primary model; OoD-based tasks do not.
bool task_is_error_based(const std::string& task);
// Only perf_drop is lower-better.
bool task_lower_better(const std::string& task);

struct DatasetSpec {
  std::string name;
  std::string path;
  std::string label_column;
  LabelRule label_rule;
  SplitSpec split;
  std::map<std::string, ColumnKind> schema_hints;
};

struct TaskParams {
  int grid_size = 101;
  int n_bootstrap = 100;
  double alpha = 0.05;
  // When true, perf-drop uses the single shifted set instead of bootstraps.
  bool perf_drop_single_set = false;
};

struct BenchmarkConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> models;  // logistic | mlp | deep_ensemble
  std::vector<std::uint64_t> seeds;
  std::array<double, 3> ratios = {0.6, 0.2, 0.2};
  TaskParams tasks;
  std::string output_dir = "bench_out";
  int knn_k = 10;
  int ensemble_members = 10;
  int mlp_hidden = 100;
  int jobs = 1;

  static BenchmarkConfig from_file(const std::string& path);
  void validate() const;  // throws on structural errors
  std::uint64_t hash() const;
};

struct AggregateCell {
  std::string model;
  std::string uq_method;
  std::string score_name;
  std::string task;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n_effective = 0;  // dataset x seed cells that produced a value
  std::size_t n_missing = 0;
  bool bold = false;
  bool lower_better = false;
};

struct BenchmarkReport {
  std::uint64_t config_hash = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> dataset_names;
  std::vector<TaskResult> results;       // raw per (dataset, seed) records
  std::vector<AggregateCell> cells;      // aggregated, bold flags applied
  std::size_t missing_count = 0;
};

// Mean over datasets within each seed, then mean/std over seeds; bolding
// applied per the +-1 sigma overlap rule (error-based tasks grouped per
// model, OoD-based tasks grouped globally).
std::vector<AggregateCell> aggregate_results(
    const std::vector<TaskResult>& results,
    const std::vector<std::string>& dataset_names,
    const std::vector<std::uint64_t>& seeds);

// Sets bold flags in place for one group of cells sharing a task (and, for
// error-based tasks, a model): a cell is bold iff [m - s, m + s] overlaps
// the best cell's interval.
void apply_bolding(std::vector<AggregateCell*>& group);

BenchmarkReport run_benchmark(const BenchmarkConfig& config);

// Evaluates a single (dataset, seed, model, scorer, task) cell; used by the
// `task` CLI subcommand. scorer is one of: max_confidence,
// ic_max_confidence, cp_p_value, cp_credibility, cp_confidence,
// knn_distance, total, aleatoric, epistemic.
TaskResult run_single_cell(const BenchmarkConfig& config,
                           const std::string& dataset, std::uint64_t seed,
                           const std::string& model, const std::string& scorer,
                           const std::string& task,
                           const std::string& dump_scores_path = "");

// Report emission / re-ingestion.
void emit_markdown(const BenchmarkReport& report, const std::string& path);
void emit_csv(const BenchmarkReport& report, const std::string& path);
void emit_json(const BenchmarkReport& report, const std::string& path);
BenchmarkReport load_report_json(const std::string& path);

}  // namespace uqbench
