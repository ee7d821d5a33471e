#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "uqbench/models.hpp"
#include "uqbench/uq.hpp"

namespace uqbench {

// Inputs shared by the five downstream-task evaluators. `test` and `shifted`
// must be preprocessed with the same fitted Preprocessor.
struct TaskInput {
  const Predictor* model = nullptr;
  const UncertaintyScorer* scorer = nullptr;
  Eigen::MatrixXd X_test;
  std::vector<int> y_test;
  Eigen::MatrixXd X_shifted;
  std::vector<int> y_shifted;
  std::uint64_t rng_seed = 0;
};

struct RetentionCurve {
  std::vector<double> budgets;    // uniform grid over [0, 1]
  std::vector<double> f1_values;  // F1 of oracle-augmented predictions
  double area = 0.0;              // trapezoid over the grid
};

// For each budget r the predictions of the ceil(r*n) samples with highest
// uncertainty are replaced with the true labels (ties broken by stable
// sample index) and F1 against the truth is recorded.
RetentionCurve retention(const TaskInput& input, int grid_size = 101);

// AUROC of the uncertainty score against prediction errors on the test
// set. Missing when the model is all-correct or all-wrong.
std::optional<double> error_detection(const TaskInput& input);

// AUROC of the uncertainty score for separating shifted (event 1) from
// test (event 0) samples.
std::optional<double> ood_detection(const TaskInput& input);

// Fraction of seeded bootstraps of the shifted set whose uncertainty
// distribution differs from the test distribution at level alpha (KS).
double shift_detection(const TaskInput& input, int n_bootstrap = 100,
                       double alpha = 0.05);

// Averaged-thresholded-confidence state: the threshold is the
// (1 - test error rate) empirical quantile of test uncertainties (lower
// interpolation), so the mass above it matches the error rate within
// 1/n_test. theta apportions the tie mass at the threshold so that the
// self-consistency bound holds under heavily tied scores.
struct AtcState {
  double threshold = 0.0;
  double tie_fraction = 0.0;  // share of scores equal to threshold counted
  double test_error_rate = 0.0;
  bool low_information = false;  // constant uncertainty scores
};

AtcState atc_fit(const std::vector<double>& test_uncertainty,
                 const std::vector<int>& predictions,
                 const std::vector<int>& labels);

double atc_estimate(const AtcState& state,
                    const std::vector<double>& uncertainty);

// Mean absolute error between the ATC error estimate and the true model
// error over n_bootstrap bootstraps of the shifted set. n_bootstrap == 0
// evaluates the single shifted set without resampling.
double perf_drop_prediction(const TaskInput& input, int n_bootstrap = 100);

// One benchmark cell: a (scorer, task) metric for one dataset and seed.
struct TaskResult {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string model;
  std::string uq_method;
  std::string score_name;
  std::string task;
  double value = 0.0;
  bool missing = false;
};

}  // namespace uqbench
