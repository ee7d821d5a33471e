#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uqbench/bench.hpp"
#include "uqbench/csv.hpp"
#include "uqbench/metrics.hpp"
#include "uqbench/preprocess.hpp"
#include "uqbench/splits.hpp"
#include "uqbench/synth.hpp"
#include "uqbench/tasks.hpp"
#include "uqbench/uq.hpp"

namespace py = pybind11;
using namespace uqbench;

namespace {

// Task evaluation entry points take the fitted objects plus numpy arrays;
// TaskInput stays internal.
TaskInput make_input(const Predictor& model, const UncertaintyScorer& scorer,
                     Eigen::MatrixXd X_test, std::vector<int> y_test,
                     Eigen::MatrixXd X_shifted, std::vector<int> y_shifted,
                     std::uint64_t rng_seed) {
  return TaskInput{&model,    &scorer,  std::move(X_test),
                   std::move(y_test),   std::move(X_shifted),
                   std::move(y_shifted), rng_seed};
}

}  // namespace

PYBIND11_MODULE(_uqbench, m) {
  m.doc() = "Uncertainty-quantification downstream-task benchmark harness";

  // --- data ---------------------------------------------------------------
  py::enum_<ColumnKind>(m, "ColumnKind")
      .value("numeric", ColumnKind::numeric)
      .value("categorical", ColumnKind::categorical);

  py::class_<TabularDataset>(m, "TabularDataset")
      .def_property_readonly("name", &TabularDataset::name)
      .def_property_readonly("n_rows", &TabularDataset::n_rows)
      .def_property_readonly("n_features", &TabularDataset::n_features)
      .def_property_readonly("labels", &TabularDataset::labels)
      .def("drop_column", &TabularDataset::drop_column);

  py::class_<LabelRule> label_rule(m, "LabelRule");
  label_rule.def(py::init<>())
      .def_readwrite("positive", &LabelRule::positive)
      .def_readwrite("mode", &LabelRule::mode);
  py::enum_<LabelRule::Mode>(label_rule, "Mode")
      .value("auto_two", LabelRule::Mode::auto_two)
      .value("positive_value", LabelRule::Mode::positive_value)
      .value("majority", LabelRule::Mode::majority);

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("label_column"),
        py::arg("rule") = LabelRule{},
        py::arg("schema_hints") = std::map<std::string, ColumnKind>{});

  py::class_<SplitSpec>(m, "SplitSpec")
      .def(py::init<>())
      .def_readwrite("feature", &SplitSpec::feature)
      .def_readwrite("ood_values", &SplitSpec::ood_values)
      .def_readwrite("drop_feature", &SplitSpec::drop_feature);

  py::class_<OodSplit>(m, "OodSplit")
      .def_readonly("in_dist", &OodSplit::in_dist)
      .def_readonly("ood", &OodSplit::ood);
  m.def("ood_split", &ood_split);

  py::class_<DataSplits>(m, "DataSplits")
      .def_readonly("train", &DataSplits::train)
      .def_readonly("calibration", &DataSplits::calibration)
      .def_readonly("test", &DataSplits::test)
      .def_readonly("ood", &DataSplits::ood)
      .def_readonly("seed", &DataSplits::seed);
  m.def("make_splits", &make_splits, py::arg("in_dist"), py::arg("ood"),
        py::arg("ratios") = std::array<double, 3>{0.6, 0.2, 0.2},
        py::arg("seed") = 0);
  m.def("bootstrap", &bootstrap);

  py::class_<Preprocessor>(m, "Preprocessor")
      .def_static("fit", &Preprocessor::fit)
      .def("transform", &Preprocessor::transform)
      .def_property_readonly("width", &Preprocessor::width);

  m.def("make_synthetic_adult", &make_synthetic_adult, py::arg("n_rows"),
        py::arg("seed"));
  m.def("write_csv", &write_csv, py::arg("data"), py::arg("path"),
        py::arg("label_column") = "income");

  // --- models ---------------------------------------------------------------
  py::class_<Predictor, std::shared_ptr<Predictor>>(m, "Predictor")
      .def("fit", &Predictor::fit)
      .def("predict_proba", &Predictor::predict_proba)
      .def_property_readonly("is_ensemble", &Predictor::is_ensemble)
      .def_property_readonly("name", &Predictor::name);

  py::class_<LogisticRegression, Predictor,
             std::shared_ptr<LogisticRegression>>(m, "LogisticRegression")
      .def(py::init<>());

  py::class_<MlpConfig>(m, "MlpConfig")
      .def(py::init<>())
      .def_readwrite("hidden", &MlpConfig::hidden)
      .def_readwrite("max_epochs", &MlpConfig::max_epochs)
      .def_readwrite("learning_rate", &MlpConfig::learning_rate);

  py::class_<Mlp, Predictor, std::shared_ptr<Mlp>>(m, "Mlp")
      .def(py::init<MlpConfig>(), py::arg("config") = MlpConfig{});

  py::class_<DeepEnsemble, Predictor, std::shared_ptr<DeepEnsemble>>(
      m, "DeepEnsemble")
      .def(py::init<int, MlpConfig>(), py::arg("members") = 10,
           py::arg("config") = MlpConfig{})
      .def("member_proba", &DeepEnsemble::member_proba);

  py::class_<KnnAnomalyModel, std::shared_ptr<KnnAnomalyModel>>(
      m, "KnnAnomalyModel")
      .def(py::init<int>(), py::arg("k") = 10)
      .def("fit", &KnnAnomalyModel::fit)
      .def("score_all", &KnnAnomalyModel::score_all);

  m.def("predict_labels", &predict_labels);

  // --- uncertainty scorers ---------------------------------------------------
  py::class_<UncertaintyScorer, std::shared_ptr<UncertaintyScorer>>(
      m, "UncertaintyScorer")
      .def("score", &UncertaintyScorer::score)
      .def_property_readonly("name", &UncertaintyScorer::name)
      .def_property_readonly("model_dependent",
                             &UncertaintyScorer::model_dependent);

  py::class_<MaxConfidenceScorer, UncertaintyScorer,
             std::shared_ptr<MaxConfidenceScorer>>(m, "MaxConfidenceScorer")
      .def(py::init<std::shared_ptr<const Predictor>>());

  py::class_<IsotonicCalibrator>(m, "IsotonicCalibrator")
      .def_static("fit", &IsotonicCalibrator::fit)
      .def("predict", &IsotonicCalibrator::predict)
      .def_property_readonly("knots", &IsotonicCalibrator::knots)
      .def_property_readonly("values", &IsotonicCalibrator::values);

  py::class_<IsotonicMaxConfidenceScorer, UncertaintyScorer,
             std::shared_ptr<IsotonicMaxConfidenceScorer>>(
      m, "IsotonicMaxConfidenceScorer")
      .def_static("fit", &IsotonicMaxConfidenceScorer::fit);

  py::class_<ConformalState>(m, "ConformalState")
      .def_readonly("scores", &ConformalState::scores)
      .def_readonly("usable", &ConformalState::usable);
  m.def("conformal_fit", &conformal_fit);
  m.def("conformal_pvalues", &conformal_pvalues);

  py::enum_<ConformalScoreKind>(m, "ConformalScoreKind")
      .value("p_value", ConformalScoreKind::p_value)
      .value("credibility", ConformalScoreKind::credibility)
      .value("confidence", ConformalScoreKind::confidence);
  py::class_<ConformalScorer, UncertaintyScorer,
             std::shared_ptr<ConformalScorer>>(m, "ConformalScorer")
      .def(py::init<std::shared_ptr<const Predictor>, ConformalState,
                    ConformalScoreKind>());

  py::class_<UncertaintyTriple>(m, "UncertaintyTriple")
      .def_readonly("total", &UncertaintyTriple::total)
      .def_readonly("aleatoric", &UncertaintyTriple::aleatoric)
      .def_readonly("epistemic", &UncertaintyTriple::epistemic);
  m.def("ensemble_decomposition", &ensemble_decomposition);

  py::enum_<EnsembleScoreKind>(m, "EnsembleScoreKind")
      .value("total", EnsembleScoreKind::total)
      .value("aleatoric", EnsembleScoreKind::aleatoric)
      .value("epistemic", EnsembleScoreKind::epistemic);
  py::class_<EnsembleUncertaintyScorer, UncertaintyScorer,
             std::shared_ptr<EnsembleUncertaintyScorer>>(
      m, "EnsembleUncertaintyScorer")
      .def(py::init<std::shared_ptr<const DeepEnsemble>, EnsembleScoreKind>());

  py::class_<KnnScorer, UncertaintyScorer, std::shared_ptr<KnnScorer>>(
      m, "KnnScorer")
      .def(py::init<std::shared_ptr<const KnnAnomalyModel>>());

  // --- metrics ----------------------------------------------------------------
  m.def("auroc", [](const std::vector<double>& s, const std::vector<int>& y) {
    return auroc(s, y);
  });
  m.def("f1_score", &f1_score);
  py::class_<KsResult>(m, "KsResult")
      .def_readonly("statistic", &KsResult::statistic)
      .def_readonly("p_value", &KsResult::p_value);
  m.def("ks_two_sample", &ks_two_sample);
  m.def("trapezoid_area", &trapezoid_area);

  // --- tasks ------------------------------------------------------------------
  py::class_<RetentionCurve>(m, "RetentionCurve")
      .def_readonly("budgets", &RetentionCurve::budgets)
      .def_readonly("f1_values", &RetentionCurve::f1_values)
      .def_readonly("area", &RetentionCurve::area);

  m.def(
      "retention",
      [](const Predictor& model, const UncertaintyScorer& scorer,
         Eigen::MatrixXd X, std::vector<int> y, int grid_size) {
        return retention(
            make_input(model, scorer, std::move(X), std::move(y), {}, {}, 0),
            grid_size);
      },
      py::arg("model"), py::arg("scorer"), py::arg("X_test"),
      py::arg("y_test"), py::arg("grid_size") = 101);

  m.def("error_detection",
        [](const Predictor& model, const UncertaintyScorer& scorer,
           Eigen::MatrixXd X, std::vector<int> y) {
          return error_detection(
              make_input(model, scorer, std::move(X), std::move(y), {}, {}, 0));
        });

  m.def("ood_detection",
        [](const Predictor& model, const UncertaintyScorer& scorer,
           Eigen::MatrixXd X_test, Eigen::MatrixXd X_shifted) {
          return ood_detection(make_input(model, scorer, std::move(X_test), {},
                                          std::move(X_shifted), {}, 0));
        });

  m.def(
      "shift_detection",
      [](const Predictor& model, const UncertaintyScorer& scorer,
         Eigen::MatrixXd X_test, Eigen::MatrixXd X_shifted,
         std::uint64_t rng_seed, int n_bootstrap, double alpha) {
        return shift_detection(make_input(model, scorer, std::move(X_test), {},
                                          std::move(X_shifted), {}, rng_seed),
                               n_bootstrap, alpha);
      },
      py::arg("model"), py::arg("scorer"), py::arg("X_test"),
      py::arg("X_shifted"), py::arg("rng_seed") = 0,
      py::arg("n_bootstrap") = 100, py::arg("alpha") = 0.05);

  py::class_<AtcState>(m, "AtcState")
      .def_readonly("threshold", &AtcState::threshold)
      .def_readonly("tie_fraction", &AtcState::tie_fraction)
      .def_readonly("test_error_rate", &AtcState::test_error_rate)
      .def_readonly("low_information", &AtcState::low_information);
  m.def("atc_fit", &atc_fit);
  m.def("atc_estimate", &atc_estimate);

  m.def(
      "perf_drop_prediction",
      [](const Predictor& model, const UncertaintyScorer& scorer,
         Eigen::MatrixXd X_test, std::vector<int> y_test,
         Eigen::MatrixXd X_shifted, std::vector<int> y_shifted,
         std::uint64_t rng_seed, int n_bootstrap) {
        return perf_drop_prediction(
            make_input(model, scorer, std::move(X_test), std::move(y_test),
                       std::move(X_shifted), std::move(y_shifted), rng_seed),
            n_bootstrap);
      },
      py::arg("model"), py::arg("scorer"), py::arg("X_test"),
      py::arg("y_test"), py::arg("X_shifted"), py::arg("y_shifted"),
      py::arg("rng_seed") = 0, py::arg("n_bootstrap") = 100);

  // --- benchmark ----------------------------------------------------------------
  py::class_<BenchmarkConfig>(m, "BenchmarkConfig")
      .def_static("from_file", &BenchmarkConfig::from_file)
      .def("validate", &BenchmarkConfig::validate)
      .def_readwrite("output_dir", &BenchmarkConfig::output_dir)
      .def_readwrite("seeds", &BenchmarkConfig::seeds)
      .def_readwrite("jobs", &BenchmarkConfig::jobs);

  py::class_<TaskResult>(m, "TaskResult")
      .def_readonly("dataset", &TaskResult::dataset)
      .def_readonly("seed", &TaskResult::seed)
      .def_readonly("model", &TaskResult::model)
      .def_readonly("uq_method", &TaskResult::uq_method)
      .def_readonly("score_name", &TaskResult::score_name)
      .def_readonly("task", &TaskResult::task)
      .def_readonly("value", &TaskResult::value)
      .def_readonly("missing", &TaskResult::missing);

  py::class_<AggregateCell>(m, "AggregateCell")
      .def_readonly("model", &AggregateCell::model)
      .def_readonly("uq_method", &AggregateCell::uq_method)
      .def_readonly("score_name", &AggregateCell::score_name)
      .def_readonly("task", &AggregateCell::task)
      .def_readonly("mean", &AggregateCell::mean)
      .def_readonly("stddev", &AggregateCell::stddev)
      .def_readonly("n_effective", &AggregateCell::n_effective)
      .def_readonly("n_missing", &AggregateCell::n_missing)
      .def_readonly("bold", &AggregateCell::bold);

  py::class_<BenchmarkReport>(m, "BenchmarkReport")
      .def_readonly("seeds", &BenchmarkReport::seeds)
      .def_readonly("dataset_names", &BenchmarkReport::dataset_names)
      .def_readonly("results", &BenchmarkReport::results)
      .def_readonly("cells", &BenchmarkReport::cells)
      .def_readonly("missing_count", &BenchmarkReport::missing_count);

  m.def("run_benchmark", &run_benchmark,
        py::call_guard<py::gil_scoped_release>());
  m.def("emit_markdown", &emit_markdown);
  m.def("emit_csv", &emit_csv);
  m.def("emit_json", &emit_json);
  m.def("load_report_json", &load_report_json);
}
