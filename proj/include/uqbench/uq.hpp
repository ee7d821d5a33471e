#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "uqbench/models.hpp"

namespace uqbench {

// Maps samples to a scalar uncertainty, higher = more uncertain. Scorers
// are immutable after construction; score() is pure.
class UncertaintyScorer {
 public:
  virtual ~UncertaintyScorer() = default;
  virtual Eigen::VectorXd score(const Eigen::MatrixXd& X) const = 0;
  virtual std::string name() const = 0;
  virtual bool model_dependent() const { return true; }
};

// ---------------------------------------------------------------------------
// Max-Confidence: 1 minus the maximal predicted probability over classes.

Eigen::VectorXd max_confidence_score(const Predictor& model,
                                     const Eigen::MatrixXd& X);

class MaxConfidenceScorer : public UncertaintyScorer {
 public:
  explicit MaxConfidenceScorer(std::shared_ptr<const Predictor> model)
      : model_(std::move(model)) {}
  Eigen::VectorXd score(const Eigen::MatrixXd& X) const override {
    return max_confidence_score(*model_, X);
  }
  std::string name() const override { return "max_confidence"; }

 private:
  std::shared_ptr<const Predictor> model_;
};

// ---------------------------------------------------------------------------
// Isotonic calibration (pool-adjacent-violators)

class IsotonicCalibrator {
 public:
  // Least-squares non-decreasing fit of `outcomes` against `raw_probs`.
  // Requires >= 2 points. Ties in raw_probs are pooled to their mean first.
  static IsotonicCalibrator fit(const std::vector<double>& raw_probs,
                                const std::vector<int>& outcomes);

  // Piecewise-linear interpolation between knots, clamped outside.
  double predict(double raw_prob) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> knots_;   // sorted distinct raw probabilities
  std::vector<double> values_;  // non-decreasing, in [0,1]
};

// Max-Confidence computed from isotonically calibrated probabilities: the
// calibrated distribution is (1 - g(p1), g(p1)) with p1 the raw
// positive-class probability.
class IsotonicMaxConfidenceScorer : public UncertaintyScorer {
 public:
  IsotonicMaxConfidenceScorer(std::shared_ptr<const Predictor> model,
                              IsotonicCalibrator calibrator)
      : model_(std::move(model)), calibrator_(std::move(calibrator)) {}
  // Fits the calibrator on the calibration partition.
  static IsotonicMaxConfidenceScorer fit(std::shared_ptr<const Predictor> model,
                                         const Eigen::MatrixXd& X_cal,
                                         const std::vector<int>& y_cal);
  Eigen::VectorXd score(const Eigen::MatrixXd& X) const override;
  std::string name() const override { return "ic_max_confidence"; }
  const IsotonicCalibrator& calibrator() const { return calibrator_; }

 private:
  std::shared_ptr<const Predictor> model_;
  IsotonicCalibrator calibrator_;
};

// ---------------------------------------------------------------------------
// Split conformal prediction, label-conditional (Mondrian), nonconformity
// alpha(x, y) = 1 - p(y|x).

struct ConformalState {
  std::array<std::vector<double>, 2> scores;  // sorted ascending per class
  std::array<bool, 2> usable = {false, false};
};

ConformalState conformal_fit(const Predictor& model,
                             const Eigen::MatrixXd& X_cal,
                             const std::vector<int>& y_cal);

// Finite-sample conformal p-values, one column per class:
//   p_c(x) = (#{i : alpha_i >= alpha(x, c)} + 1) / (n_c + 1)
// Ties count with >=. Unusable classes yield NaN.
Eigen::MatrixXd conformal_pvalues(const ConformalState& state,
                                  const Predictor& model,
                                  const Eigen::MatrixXd& X);

struct ConformalScoreTriple {
  double u_pvalue;       // 1 - p of the predicted class
  double u_credibility;  // 1 - max_c p_c
  double u_confidence;   // second-largest p_c
};

ConformalScoreTriple conformal_scores(const Eigen::Vector2d& pvals,
                                      int predicted_class);

enum class ConformalScoreKind { p_value, credibility, confidence };

class ConformalScorer : public UncertaintyScorer {
 public:
  ConformalScorer(std::shared_ptr<const Predictor> model, ConformalState state,
                  ConformalScoreKind kind)
      : model_(std::move(model)), state_(std::move(state)), kind_(kind) {}
  Eigen::VectorXd score(const Eigen::MatrixXd& X) const override;
  std::string name() const override;
  const ConformalState& state() const { return state_; }

 private:
  std::shared_ptr<const Predictor> model_;
  ConformalState state_;
  ConformalScoreKind kind_;
};

// ---------------------------------------------------------------------------
// Intrinsic ensemble decomposition (entropies in nats)

struct UncertaintyTriple {
  double total;
  double aleatoric;
  double epistemic;
};

// Shannon entropy of a binary distribution with probability clamping.
double binary_entropy(double p1);

// total = H(mean), aleatoric = mean member entropy, epistemic = difference
// (mutual information between prediction and member).
std::vector<UncertaintyTriple> ensemble_decomposition(
    const DeepEnsemble& model, const Eigen::MatrixXd& X);

enum class EnsembleScoreKind { total, aleatoric, epistemic };

class EnsembleUncertaintyScorer : public UncertaintyScorer {
 public:
  EnsembleUncertaintyScorer(std::shared_ptr<const DeepEnsemble> model,
                            EnsembleScoreKind kind)
      : model_(std::move(model)), kind_(kind) {}
  Eigen::VectorXd score(const Eigen::MatrixXd& X) const override;
  std::string name() const override;

 private:
  std::shared_ptr<const DeepEnsemble> model_;
  EnsembleScoreKind kind_;
};

// ---------------------------------------------------------------------------
// kNN anomaly baseline as a scorer (primary-model independent)

class KnnScorer : public UncertaintyScorer {
 public:
  explicit KnnScorer(std::shared_ptr<const KnnAnomalyModel> model)
      : model_(std::move(model)) {}
  Eigen::VectorXd score(const Eigen::MatrixXd& X) const override {
    return model_->score_all(X);
  }
  std::string name() const override { return "knn_distance"; }
  bool model_dependent() const override { return false; }

 private:
  std::shared_ptr<const KnnAnomalyModel> model_;
};

}  // namespace uqbench
