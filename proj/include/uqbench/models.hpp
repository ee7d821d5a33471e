#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace uqbench {

// Numerical floor applied to predicted probabilities before any logarithm.
inline constexpr double kProbFloor = 1e-12;

inline double clamp_prob(double p) {
  return std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
}

// Black-box probabilistic binary classifier. fit is deterministic given
// (X, y, seed); predict_proba rows are non-negative and sum to 1.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual void fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   std::uint64_t seed) = 0;
  virtual Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const = 0;
  virtual bool is_ensemble() const { return false; }
  virtual std::string name() const = 0;
};

std::vector<int> predict_labels(const Predictor& model,
                                const Eigen::MatrixXd& X);

void check_fit_inputs(const Eigen::MatrixXd& X, const std::vector<int>& y);

// ---------------------------------------------------------------------------
// Logistic regression

// Objective and gradient of the L2-regularized logistic loss on the mean
// cross-entropy, penalty weight 1.0 in the summed-loss formulation (the
// intercept, params[D], is not penalized):
//   f(w, b) = (1/N) [ sum_i ce_i + 0.5 * ||w||^2 ]
double logistic_objective(const Eigen::VectorXd& params,
                          const Eigen::MatrixXd& X, const std::vector<int>& y,
                          double reg = 1.0);
Eigen::VectorXd logistic_gradient(const Eigen::VectorXd& params,
                                  const Eigen::MatrixXd& X,
                                  const std::vector<int>& y, double reg = 1.0);

class LogisticRegression : public Predictor {
 public:
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
           std::uint64_t seed) override;
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
  std::string name() const override { return "logistic"; }

  const Eigen::VectorXd& params() const { return params_; }  // [w..., b]
  void set_params(Eigen::VectorXd p) { params_ = std::move(p); }

 private:
  Eigen::VectorXd params_;
};

// ---------------------------------------------------------------------------
// Multi-layer perceptron (one ReLU hidden layer, softmax output)

struct MlpParams {
  Eigen::MatrixXd w1;  // hidden x D
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // 2 x hidden
  Eigen::VectorXd b2;  // 2
};

// Mean cross-entropy of the network on (X, y) and its gradient, used both
// by training and by finite-difference checks.
double mlp_loss(const MlpParams& p, const Eigen::MatrixXd& X,
                const std::vector<int>& y);
MlpParams mlp_gradient(const MlpParams& p, const Eigen::MatrixXd& X,
                       const std::vector<int>& y);

struct MlpConfig {
  int hidden = 100;
  int max_epochs = 200;
  double learning_rate = 1e-3;
  int batch_size_cap = 200;
  // Stop when the epoch loss improved by less than plateau_tol (relative)
  // over the last plateau_epochs epochs.
  double plateau_tol = 1e-4;
  int plateau_epochs = 10;
};

class Mlp : public Predictor {
 public:
  explicit Mlp(MlpConfig config = {}) : config_(config) {}
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
           std::uint64_t seed) override;
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
  std::string name() const override { return "mlp"; }

  const MlpParams& params() const { return params_; }
  void set_params(MlpParams p) { params_ = std::move(p); }
  const MlpConfig& config() const { return config_; }

 private:
  MlpConfig config_;
  MlpParams params_;
};

// ---------------------------------------------------------------------------
// Deep ensemble of MLPs

class DeepEnsemble : public Predictor {
 public:
  explicit DeepEnsemble(int members = 10, MlpConfig config = {});
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
           std::uint64_t seed) override;
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
  bool is_ensemble() const override { return true; }
  std::string name() const override { return "deep_ensemble"; }

  // Per-member probabilities, M entries of N x 2.
  std::vector<Eigen::MatrixXd> member_proba(const Eigen::MatrixXd& X) const;
  const std::vector<Mlp>& members() const { return members_; }
  std::vector<Mlp>& members() { return members_; }

 private:
  std::vector<Mlp> members_;
};

// ---------------------------------------------------------------------------
// kNN same-label anomaly model (OoD baseline, primary-model independent)

class KnnAnomalyModel {
 public:
  explicit KnnAnomalyModel(int k = 10) : k_(k) {}
  void fit(const Eigen::MatrixXd& X, const std::vector<int>& y);

  // For each class present in train, the mean Euclidean distance from x to
  // its k nearest same-class train points (k clamped to the class count);
  // the score is the minimum over classes. Higher = more anomalous.
  double score(const Eigen::VectorXd& x) const;
  Eigen::VectorXd score_all(const Eigen::MatrixXd& X) const;

  int k() const { return k_; }

 private:
  int k_;
  Eigen::MatrixXd points_[2];
};

// ---------------------------------------------------------------------------
// Persistence: versioned text format (JSON with bit-exact hex doubles).

void save_model(const Predictor& model, const std::string& path);
std::unique_ptr<Predictor> load_model(const std::string& path);

}  // namespace uqbench
