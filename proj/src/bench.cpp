#include "uqbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "uqbench/metrics.hpp"
#include "uqbench/preprocess.hpp"
#include "uqbench/rng.hpp"

namespace uqbench {

bool task_is_error_based(const std::string& task) {
  return task == "retention" || task == "error_detection" ||
         task == "perf_drop";
}

bool task_lower_better(const std::string& task) { return task == "perf_drop"; }

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::unique_ptr<Predictor> make_model(const BenchmarkConfig& config,
                                      const std::string& name) {
  MlpConfig mlp_cfg;
  mlp_cfg.hidden = config.mlp_hidden;
  if (name == "logistic") return std::make_unique<LogisticRegression>();
  if (name == "mlp") return std::make_unique<Mlp>(mlp_cfg);
  if (name == "deep_ensemble") {
    return std::make_unique<DeepEnsemble>(config.ensemble_members, mlp_cfg);
  }
  throw std::invalid_argument("unknown model '" + name + "'");
}

// Fitted state for one (dataset, seed) pair, shared across scorer rows.
struct FittedCell {
  Eigen::MatrixXd X_test, X_ood;
  std::vector<int> y_test, y_ood;
  std::shared_ptr<const Predictor> model;
  std::shared_ptr<const KnnAnomalyModel> knn;
  // scorer rows: (uq_method, score_name, scorer)
  struct Row {
    std::string uq_method;
    std::string score_name;
    std::shared_ptr<const UncertaintyScorer> scorer;
  };
  std::vector<Row> rows;
  std::shared_ptr<const UncertaintyScorer> baseline_error;  // max-confidence
  std::shared_ptr<const UncertaintyScorer> baseline_ood;    // kNN distance
};

// Stream id for the per-task bootstrap RNG. The kNN baseline ignores the
// model so its OoD-based task results are shared across model rows.
std::uint64_t task_stream(std::uint64_t seed, const std::string& dataset,
                          const std::string& model, const std::string& scorer,
                          const std::string& task) {
  const std::string model_key =
      (scorer == "knn_distance") ? "knn" : model;
  std::uint64_t s = Rng::derive(seed, fnv1a(dataset));
  s = Rng::derive(s, fnv1a(model_key));
  s = Rng::derive(s, fnv1a(scorer));
  return Rng::derive(s, fnv1a(task));
}

double evaluate_task(const TaskInput& input, const std::string& task,
                     const TaskParams& params, bool& missing) {
  missing = false;
  if (task == "retention") return retention(input, params.grid_size).area;
  if (task == "error_detection") {
    auto v = error_detection(input);
    if (!v) {
      missing = true;
      return 0.0;
    }
    return *v;
  }
  if (task == "ood_detection") {
    auto v = ood_detection(input);
    if (!v) {
      missing = true;
      return 0.0;
    }
    return *v;
  }
  if (task == "shift_detection") {
    return shift_detection(input, params.n_bootstrap, params.alpha);
  }
  if (task == "perf_drop") {
    return perf_drop_prediction(
        input, params.perf_drop_single_set ? 0 : params.n_bootstrap);
  }
  throw std::invalid_argument("unknown task '" + task + "'");
}

TaskResult evaluate_one(const FittedCell& cell, const BenchmarkConfig& config,
                        const std::string& dataset, std::uint64_t seed,
                        const std::string& model_name,
                        const std::string& uq_method,
                        const std::string& score_name,
                        const UncertaintyScorer& scorer,
                        const std::string& task) {
  TaskResult r;
  r.dataset = dataset;
  r.seed = seed;
  r.model = model_name;
  r.uq_method = uq_method;
  r.score_name = score_name;
  r.task = task;
  TaskInput input{cell.model.get(), &scorer,     cell.X_test, cell.y_test,
                  cell.X_ood,       cell.y_ood,  0};
  input.rng_seed = task_stream(seed, dataset, model_name, scorer.name(), task);
  try {
    r.value = evaluate_task(input, task, config.tasks, r.missing);
  } catch (const std::exception&) {
    // Cell-level failure isolation: record a missing value and continue.
    r.missing = true;
    r.value = 0.0;
  }
  return r;
}

FittedCell fit_cell(const BenchmarkConfig& config, const DatasetSpec& spec,
                    const TabularDataset& in_dist, const TabularDataset& ood,
                    std::uint64_t seed, const std::string& model_name) {
  DataSplits splits = make_splits(in_dist, ood, config.ratios, seed);
  Preprocessor pre = Preprocessor::fit(splits.train);

  FittedCell cell;
  Eigen::MatrixXd X_train = pre.transform(splits.train);
  Eigen::MatrixXd X_cal = pre.transform(splits.calibration);
  cell.X_test = pre.transform(splits.test);
  cell.X_ood = pre.transform(splits.ood);
  cell.y_test = splits.test.labels();
  cell.y_ood = splits.ood.labels();

  auto model = make_model(config, model_name);
  model->fit(X_train, splits.train.labels(),
             Rng::derive(seed, fnv1a(model_name)));
  cell.model = std::shared_ptr<const Predictor>(std::move(model));

  auto knn = std::make_shared<KnnAnomalyModel>(config.knn_k);
  knn->fit(X_train, splits.train.labels());
  cell.knn = knn;

  cell.baseline_error = std::make_shared<MaxConfidenceScorer>(cell.model);
  cell.baseline_ood = std::make_shared<KnnScorer>(cell.knn);

  // Agnostic UQ rows wrap the model as a black box, the ensemble included.
  cell.rows.push_back(
      {"isotonic_calibration", "max_confidence",
       std::make_shared<IsotonicMaxConfidenceScorer>(
           IsotonicMaxConfidenceScorer::fit(cell.model, X_cal,
                                            splits.calibration.labels()))});
  ConformalState cp_state =
      conformal_fit(*cell.model, X_cal, splits.calibration.labels());
  cell.rows.push_back({"conformal_prediction", "p_value",
                       std::make_shared<ConformalScorer>(
                           cell.model, cp_state, ConformalScoreKind::p_value)});
  cell.rows.push_back(
      {"conformal_prediction", "credibility",
       std::make_shared<ConformalScorer>(cell.model, cp_state,
                                         ConformalScoreKind::credibility)});
  cell.rows.push_back(
      {"conformal_prediction", "confidence",
       std::make_shared<ConformalScorer>(cell.model, cp_state,
                                         ConformalScoreKind::confidence)});
  if (const auto* ens =
          dynamic_cast<const DeepEnsemble*>(cell.model.get())) {
    auto shared_ens = std::shared_ptr<const DeepEnsemble>(cell.model, ens);
    cell.rows.push_back({"intrinsic", "total",
                         std::make_shared<EnsembleUncertaintyScorer>(
                             shared_ens, EnsembleScoreKind::total)});
    cell.rows.push_back({"intrinsic", "aleatoric",
                         std::make_shared<EnsembleUncertaintyScorer>(
                             shared_ens, EnsembleScoreKind::aleatoric)});
    cell.rows.push_back({"intrinsic", "epistemic",
                         std::make_shared<EnsembleUncertaintyScorer>(
                             shared_ens, EnsembleScoreKind::epistemic)});
  }
  (void)spec;
  return cell;
}

std::vector<TaskResult> evaluate_dataset_seed(const BenchmarkConfig& config,
                                              const DatasetSpec& spec,
                                              const TabularDataset& in_dist,
                                              const TabularDataset& ood,
                                              std::uint64_t seed) {
  std::vector<TaskResult> out;
  for (const std::string& model_name : config.models) {
    FittedCell cell = fit_cell(config, spec, in_dist, ood, seed, model_name);
    for (const auto& row : cell.rows) {
      for (const std::string& task : kTaskOrder) {
        out.push_back(evaluate_one(cell, config, spec.name, seed, model_name,
                                   row.uq_method, row.score_name, *row.scorer,
                                   task));
      }
    }
    // Baseline row: Max-Confidence for error-based tasks, kNN distance for
    // OoD-based tasks.
    for (const std::string& task : kTaskOrder) {
      const UncertaintyScorer& scorer = task_is_error_based(task)
                                            ? *cell.baseline_error
                                            : *cell.baseline_ood;
      out.push_back(evaluate_one(cell, config, spec.name, seed, model_name,
                                 "none", "baseline", scorer, task));
    }
  }
  return out;
}

struct LoadedDataset {
  TabularDataset in_dist;
  TabularDataset ood;
};

LoadedDataset load_dataset(const DatasetSpec& spec) {
  try {
    TabularDataset raw = load_csv(spec.path, spec.label_column,
                                  spec.label_rule, spec.schema_hints);
    OodSplit split = ood_split(raw, spec.split);
    return {std::move(split.in_dist), std::move(split.ood)};
  } catch (const std::exception& e) {
    throw std::runtime_error("dataset '" + spec.name + "': " + e.what());
  }
}

}  // namespace

std::vector<AggregateCell> aggregate_results(
    const std::vector<TaskResult>& results,
    const std::vector<std::string>& dataset_names,
    const std::vector<std::uint64_t>& seeds) {
  struct Key {
    std::string model, uq, score, task;
    auto operator<=>(const Key&) const = default;
  };
  // Preserve first-appearance order for reporting.
  std::vector<Key> order;
  std::map<Key, std::map<std::uint64_t, std::vector<double>>> per_seed;
  std::map<Key, std::size_t> missing;
  for (const TaskResult& r : results) {
    Key k{r.model, r.uq_method, r.score_name, r.task};
    if (!per_seed.count(k)) order.push_back(k);
    auto& m = per_seed[k];
    if (r.missing) {
      ++missing[k];
    } else {
      m[r.seed].push_back(r.value);
    }
  }
  std::sort(order.begin(), order.end(), [&](const Key& a, const Key& b) {
    // Stable report order: model, uq method, score, then task order.
    auto task_rank = [](const std::string& t) {
      return std::find(kTaskOrder.begin(), kTaskOrder.end(), t) -
             kTaskOrder.begin();
    };
    const auto lhs = std::tie(a.model, a.uq, a.score);
    const auto rhs = std::tie(b.model, b.uq, b.score);
    if (lhs != rhs) return lhs < rhs;
    return task_rank(a.task) < task_rank(b.task);
  });

  std::vector<AggregateCell> cells;
  for (const Key& k : order) {
    AggregateCell c;
    c.model = k.model;
    c.uq_method = k.uq;
    c.score_name = k.score;
    c.task = k.task;
    c.lower_better = task_lower_better(k.task);
    c.n_missing = missing.count(k) ? missing[k] : 0;

    std::vector<double> seed_means;
    for (std::uint64_t s : seeds) {
      auto it = per_seed[k].find(s);
      if (it == per_seed[k].end() || it->second.empty()) continue;
      const auto& vals = it->second;
      c.n_effective += vals.size();
      seed_means.push_back(
          std::accumulate(vals.begin(), vals.end(), 0.0) /
          static_cast<double>(vals.size()));
    }
    if (!seed_means.empty()) {
      const double m =
          std::accumulate(seed_means.begin(), seed_means.end(), 0.0) /
          static_cast<double>(seed_means.size());
      double var = 0.0;
      for (double v : seed_means) var += (v - m) * (v - m);
      var /= static_cast<double>(seed_means.size());
      c.mean = m;
      c.stddev = std::sqrt(var);
    }
    (void)dataset_names;
    cells.push_back(std::move(c));
  }

  // Bolding groups: error-based tasks per model, OoD-based tasks global.
  std::map<std::pair<std::string, std::string>, std::vector<AggregateCell*>>
      groups;
  for (AggregateCell& c : cells) {
    if (c.n_effective == 0) continue;
    const std::string model_key = task_is_error_based(c.task) ? c.model : "";
    groups[{c.task, model_key}].push_back(&c);
  }
  for (auto& [key, group] : groups) apply_bolding(group);
  return cells;
}

void apply_bolding(std::vector<AggregateCell*>& group) {
  if (group.empty()) {
    throw std::invalid_argument("apply_bolding: empty group");
  }
  const bool lower = group.front()->lower_better;
  const AggregateCell* best = group.front();
  for (const AggregateCell* c : group) {
    if (lower ? c->mean < best->mean : c->mean > best->mean) best = c;
  }
  const double lo = best->mean - best->stddev;
  const double hi = best->mean + best->stddev;
  for (AggregateCell* c : group) {
    c->bold = (c->mean - c->stddev <= hi) && (c->mean + c->stddev >= lo);
  }
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  config.validate();

  std::vector<LoadedDataset> loaded;
  loaded.reserve(config.datasets.size());
  for (const DatasetSpec& spec : config.datasets) {
    loaded.push_back(load_dataset(spec));
  }

  // One work unit per (dataset, seed); seeds are pre-derived so parallel
  // and serial execution produce identical reports.
  struct Unit {
    std::size_t dataset_idx;
    std::uint64_t seed;
  };
  std::vector<Unit> units;
  for (std::size_t d = 0; d < config.datasets.size(); ++d) {
    for (std::uint64_t s : config.seeds) units.push_back({d, s});
  }

  std::vector<std::vector<TaskResult>> partial(units.size());
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < units.size(); ++i) {
      const Unit& u = units[i];
      partial[i] = evaluate_dataset_seed(config, config.datasets[u.dataset_idx],
                                         loaded[u.dataset_idx].in_dist,
                                         loaded[u.dataset_idx].ood, u.seed);
    }
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<std::size_t> next{0};
    for (int j = 0; j < jobs; ++j) {
      futures.push_back(std::async(std::launch::async, [&]() {
        for (std::size_t i = next.fetch_add(1); i < units.size();
             i = next.fetch_add(1)) {
          const Unit& u = units[i];
          partial[i] = evaluate_dataset_seed(
              config, config.datasets[u.dataset_idx],
              loaded[u.dataset_idx].in_dist, loaded[u.dataset_idx].ood,
              u.seed);
        }
      }));
    }
    for (auto& f : futures) f.get();
  }

  BenchmarkReport report;
  report.config_hash = config.hash();
  report.seeds = config.seeds;
  for (const DatasetSpec& spec : config.datasets) {
    report.dataset_names.push_back(spec.name);
  }
  for (auto& p : partial) {
    for (TaskResult& r : p) {
      report.missing_count += r.missing;
      report.results.push_back(std::move(r));
    }
  }
  report.cells =
      aggregate_results(report.results, report.dataset_names, report.seeds);
  return report;
}

TaskResult run_single_cell(const BenchmarkConfig& config,
                           const std::string& dataset, std::uint64_t seed,
                           const std::string& model,
                           const std::string& scorer_name,
                           const std::string& task,
                           const std::string& dump_scores_path) {
  const DatasetSpec* spec = nullptr;
  for (const DatasetSpec& s : config.datasets) {
    if (s.name == dataset) spec = &s;
  }
  if (!spec) throw std::invalid_argument("unknown dataset '" + dataset + "'");
  LoadedDataset loaded = load_dataset(*spec);
  FittedCell cell =
      fit_cell(config, *spec, loaded.in_dist, loaded.ood, seed, model);

  std::shared_ptr<const UncertaintyScorer> scorer;
  std::string uq_method = "none";
  if (scorer_name == "max_confidence") {
    scorer = cell.baseline_error;
  } else if (scorer_name == "knn_distance") {
    scorer = cell.baseline_ood;
  } else {
    for (const auto& row : cell.rows) {
      if (row.scorer->name() == scorer_name) {
        scorer = row.scorer;
        uq_method = row.uq_method;
      }
    }
  }
  if (!scorer) {
    throw std::invalid_argument("unknown scorer '" + scorer_name + "'");
  }

  if (!dump_scores_path.empty()) {
    Eigen::VectorXd u_test = scorer->score(cell.X_test);
    Eigen::VectorXd u_shift = scorer->score(cell.X_ood);
    std::ofstream out(dump_scores_path);
    if (!out) {
      throw std::runtime_error("cannot write " + dump_scores_path);
    }
    out << "partition,sample_id,score\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < u_test.size(); ++i) {
      out << "test," << i << "," << u_test(i) << "\n";
    }
    for (Eigen::Index i = 0; i < u_shift.size(); ++i) {
      out << "shifted," << i << "," << u_shift(i) << "\n";
    }
  }

  return evaluate_one(cell, config, dataset, seed, model, uq_method,
                      scorer->name(), *scorer, task);
}

}  // namespace uqbench
