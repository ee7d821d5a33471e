#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uqbench/bench.hpp"

namespace uqbench {
namespace {

using nlohmann::json;

std::uint64_t fnv1a_bytes(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

LabelRule parse_label_rule(const json& j) {
  LabelRule rule;
  if (!j.contains("label_rule")) return rule;
  const json& r = j.at("label_rule");
  const std::string mode = r.at("mode").get<std::string>();
  if (mode == "auto") {
    rule.mode = LabelRule::Mode::auto_two;
  } else if (mode == "positive_value") {
    rule.mode = LabelRule::Mode::positive_value;
    rule.positive = r.at("positive").get<std::string>();
  } else if (mode == "majority") {
    rule.mode = LabelRule::Mode::majority;
  } else {
    throw std::runtime_error("config: unknown label_rule mode '" + mode + "'");
  }
  return rule;
}

json config_to_json(const BenchmarkConfig& c) {
  json j;
  json datasets = json::array();
  for (const DatasetSpec& d : c.datasets) {
    json ds;
    ds["name"] = d.name;
    ds["path"] = d.path;
    ds["label_column"] = d.label_column;
    ds["split"] = {{"feature", d.split.feature},
                   {"ood_values", d.split.ood_values},
                   {"drop_feature", d.split.drop_feature}};
    datasets.push_back(ds);
  }
  j["datasets"] = datasets;
  j["models"] = c.models;
  j["seeds"] = c.seeds;
  j["ratios"] = c.ratios;
  j["tasks"] = {{"grid_size", c.tasks.grid_size},
                {"n_bootstrap", c.tasks.n_bootstrap},
                {"alpha", c.tasks.alpha},
                {"perf_drop_single_set", c.tasks.perf_drop_single_set}};
  j["knn_k"] = c.knn_k;
  j["ensemble_members"] = c.ensemble_members;
  j["mlp_hidden"] = c.mlp_hidden;
  return j;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

BenchmarkConfig BenchmarkConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config parse error in " + path + ": " +
                             e.what());
  }

  BenchmarkConfig c;
  for (const json& d : j.at("datasets")) {
    DatasetSpec spec;
    spec.name = d.at("name").get<std::string>();
    spec.path = d.at("path").get<std::string>();
    spec.label_column = d.at("label_column").get<std::string>();
    spec.label_rule = parse_label_rule(d);
    const json& s = d.at("split");
    spec.split.feature = s.at("feature").get<std::string>();
    for (const json& v : s.at("ood_values")) {
      spec.split.ood_values.insert(v.get<std::string>());
    }
    spec.split.drop_feature = s.value("drop_feature", true);
    if (d.contains("schema_hints")) {
      for (const auto& [col, kind] : d.at("schema_hints").items()) {
        spec.schema_hints[col] = kind.get<std::string>() == "categorical"
                                     ? ColumnKind::categorical
                                     : ColumnKind::numeric;
      }
    }
    c.datasets.push_back(std::move(spec));
  }
  c.models = j.at("models").get<std::vector<std::string>>();
  if (j.contains("seeds")) {
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } else {
    const int n = j.value("num_seeds", 10);
    for (int i = 0; i < n; ++i) c.seeds.push_back(i);
  }
  if (j.contains("ratios")) {
    auto r = j.at("ratios").get<std::vector<double>>();
    if (r.size() != 3) throw std::runtime_error("config: ratios needs 3 entries");
    c.ratios = {r[0], r[1], r[2]};
  }
  if (j.contains("tasks")) {
    const json& t = j.at("tasks");
    c.tasks.grid_size = t.value("grid_size", c.tasks.grid_size);
    c.tasks.n_bootstrap = t.value("n_bootstrap", c.tasks.n_bootstrap);
    c.tasks.alpha = t.value("alpha", c.tasks.alpha);
    c.tasks.perf_drop_single_set =
        t.value("perf_drop_single_set", c.tasks.perf_drop_single_set);
  }
  c.output_dir = j.value("output_dir", c.output_dir);
  c.knn_k = j.value("knn_k", c.knn_k);
  c.ensemble_members = j.value("ensemble_members", c.ensemble_members);
  c.mlp_hidden = j.value("mlp_hidden", c.mlp_hidden);
  return c;
}

void BenchmarkConfig::validate() const {
  if (datasets.empty()) throw std::runtime_error("config: no datasets");
  if (models.empty()) throw std::runtime_error("config: no models");
  if (seeds.empty()) throw std::runtime_error("config: no seeds");
  for (const DatasetSpec& d : datasets) {
    if (!std::filesystem::exists(d.path)) {
      throw std::runtime_error("config: dataset file not found: " + d.path);
    }
    if (d.split.feature.empty()) {
      throw std::runtime_error("config: dataset '" + d.name +
                               "' has no split feature");
    }
    if (d.split.ood_values.empty()) {
      throw std::runtime_error("config: dataset '" + d.name +
                               "' has empty ood_values");
    }
  }
  for (const std::string& m : models) {
    if (m != "logistic" && m != "mlp" && m != "deep_ensemble") {
      throw std::runtime_error("config: unknown model '" + m + "'");
    }
  }
  const double ratio_sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] <= 0 || ratios[1] <= 0 || ratios[2] <= 0 ||
      std::abs(ratio_sum - 1.0) > 1e-9) {
    throw std::runtime_error("config: split ratios must be positive and sum to 1");
  }
}

std::uint64_t BenchmarkConfig::hash() const {
  return fnv1a_bytes(config_to_json(*this).dump());
}

void emit_markdown(const BenchmarkReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);

  out << "# Benchmark report\n\n";
  out << "- config hash: `" << hex64(report.config_hash) << "`\n";
  out << "- seeds:";
  for (auto s : report.seeds) out << " " << s;
  out << "\n- datasets:";
  for (const auto& d : report.dataset_names) out << " " << d;
  out << "\n- missing cells: " << report.missing_count << "\n\n";
  out << "Cells are mean +/- std over seeds (each seed averaged over "
         "datasets). Bold marks overlap with the best performer's "
         "[m-s, m+s] interval; error-based columns are compared per model, "
         "OoD-based columns globally. Baseline row: (*) Max-Confidence of "
         "the primary model, (+) kNN same-label distance, shared across "
         "models.\n\n";

  out << "| Model | UQ method | Score |";
  for (const std::string& t : kTaskOrder) out << " " << t << " |";
  out << "\n|---|---|---|";
  for (std::size_t i = 0; i < kTaskOrder.size(); ++i) out << "---|";
  out << "\n";

  // Rows keyed by (model, uq, score) in aggregate order.
  std::vector<std::tuple<std::string, std::string, std::string>> row_keys;
  for (const AggregateCell& c : report.cells) {
    std::tuple<std::string, std::string, std::string> key{c.model, c.uq_method,
                                                          c.score_name};
    if (std::find(row_keys.begin(), row_keys.end(), key) == row_keys.end()) {
      row_keys.push_back(key);
    }
  }
  for (const auto& [model, uq, score] : row_keys) {
    out << "| " << model << " | " << uq << " | " << score << " |";
    for (const std::string& t : kTaskOrder) {
      const AggregateCell* cell = nullptr;
      for (const AggregateCell& c : report.cells) {
        if (c.model == model && c.uq_method == uq && c.score_name == score &&
            c.task == t) {
          cell = &c;
        }
      }
      if (!cell || cell->n_effective == 0) {
        out << " - |";
        continue;
      }
      std::string text =
          format_value(cell->mean) + " ± " + format_value(cell->stddev);
      if (score == "baseline") {
        text += task_is_error_based(t) ? " (*)" : " (+)";
      }
      if (cell->bold) text = "**" + text + "**";
      out << " " << text << " |";
    }
    out << "\n";
  }
}

void emit_csv(const BenchmarkReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "dataset,seed,model,uq_method,score,task,value,missing\n";
  out.precision(17);
  for (const TaskResult& r : report.results) {
    out << r.dataset << "," << r.seed << "," << r.model << "," << r.uq_method
        << "," << r.score_name << "," << r.task << "," << r.value << ","
        << (r.missing ? 1 : 0) << "\n";
  }
}

void emit_json(const BenchmarkReport& report, const std::string& path) {
  json j;
  j["schema_version"] = 1;
  j["config_hash"] = hex64(report.config_hash);
  j["seeds"] = report.seeds;
  j["datasets"] = report.dataset_names;
  j["missing_count"] = report.missing_count;

  json results = json::array();
  for (const TaskResult& r : report.results) {
    results.push_back({{"dataset", r.dataset},
                       {"seed", r.seed},
                       {"model", r.model},
                       {"uq_method", r.uq_method},
                       {"score", r.score_name},
                       {"task", r.task},
                       {"value", r.value},
                       {"missing", r.missing}});
  }
  j["results"] = std::move(results);

  json cells = json::array();
  for (const AggregateCell& c : report.cells) {
    cells.push_back({{"model", c.model},
                     {"uq_method", c.uq_method},
                     {"score", c.score_name},
                     {"task", c.task},
                     {"mean", c.mean},
                     {"std", c.stddev},
                     {"n_effective", c.n_effective},
                     {"n_missing", c.n_missing},
                     {"bold", c.bold},
                     {"lower_better", c.lower_better}});
  }
  j["cells"] = std::move(cells);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

BenchmarkReport load_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path);
  json j = json::parse(in);
  if (j.at("schema_version").get<int>() != 1) {
    throw std::runtime_error("unsupported report schema version");
  }
  BenchmarkReport report;
  report.config_hash =
      std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
  report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  report.dataset_names = j.at("datasets").get<std::vector<std::string>>();
  report.missing_count = j.at("missing_count").get<std::size_t>();
  for (const json& r : j.at("results")) {
    TaskResult t;
    t.dataset = r.at("dataset").get<std::string>();
    t.seed = r.at("seed").get<std::uint64_t>();
    t.model = r.at("model").get<std::string>();
    t.uq_method = r.at("uq_method").get<std::string>();
    t.score_name = r.at("score").get<std::string>();
    t.task = r.at("task").get<std::string>();
    t.value = r.at("value").get<double>();
    t.missing = r.at("missing").get<bool>();
    report.results.push_back(std::move(t));
  }
  for (const json& c : j.at("cells")) {
    AggregateCell cell;
    cell.model = c.at("model").get<std::string>();
    cell.uq_method = c.at("uq_method").get<std::string>();
    cell.score_name = c.at("score").get<std::string>();
    cell.task = c.at("task").get<std::string>();
    cell.mean = c.at("mean").get<double>();
    cell.stddev = c.at("std").get<double>();
    cell.n_effective = c.at("n_effective").get<std::size_t>();
    cell.n_missing = c.at("n_missing").get<std::size_t>();
    cell.bold = c.at("bold").get<bool>();
    cell.lower_better = c.at("lower_better").get<bool>();
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace uqbench
