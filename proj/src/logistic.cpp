#include <cmath>
#include <stdexcept>

#include "uqbench/models.hpp"

namespace uqbench {

void check_fit_inputs(const Eigen::MatrixXd& X, const std::vector<int>& y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw std::invalid_argument("fit: X rows and y length differ");
  }
  if (!X.allFinite()) {
    throw std::invalid_argument("fit: non-finite features");
  }
  bool any0 = false, any1 = false;
  for (int v : y) {
    if (v != 0 && v != 1) throw std::invalid_argument("fit: labels not binary");
    (v ? any1 : any0) = true;
  }
  if (!any0 || !any1) {
    throw std::invalid_argument("fit: single-class labels");
  }
}

std::vector<int> predict_labels(const Predictor& model,
                                const Eigen::MatrixXd& X) {
  Eigen::MatrixXd proba = model.predict_proba(X);
  std::vector<int> out(proba.rows());
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    out[i] = proba(i, 1) > proba(i, 0) ? 1 : 0;
  }
  return out;
}

namespace {

inline double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double logistic_objective(const Eigen::VectorXd& params,
                          const Eigen::MatrixXd& X, const std::vector<int>& y,
                          double reg) {
  const Eigen::Index d = X.cols();
  const Eigen::Index n = X.rows();
  const Eigen::VectorXd w = params.head(d);
  const double b = params(d);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z = X.row(i).dot(w) + b;
    // -log p(y|x) in a numerically stable form
    const double t = y[i] ? -z : z;
    loss += (t > 0) ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  loss += 0.5 * reg * w.squaredNorm();
  return loss / static_cast<double>(n);
}

Eigen::VectorXd logistic_gradient(const Eigen::VectorXd& params,
                                  const Eigen::MatrixXd& X,
                                  const std::vector<int>& y, double reg) {
  const Eigen::Index d = X.cols();
  const Eigen::Index n = X.rows();
  const Eigen::VectorXd w = params.head(d);
  const double b = params(d);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = sigmoid(X.row(i).dot(w) + b);
    const double r = p - static_cast<double>(y[i]);
    g.head(d) += r * X.row(i).transpose();
    g(d) += r;
  }
  g.head(d) += reg * w;
  g /= static_cast<double>(n);
  return g;
}

void LogisticRegression::fit(const Eigen::MatrixXd& X,
                             const std::vector<int>& y,
                             std::uint64_t /*seed*/) {
  check_fit_inputs(X, y);
  const Eigen::Index d = X.cols();
  const Eigen::Index n = X.rows();
  const double reg = 1.0;

  Eigen::VectorXd params = Eigen::VectorXd::Zero(d + 1);
  constexpr int kMaxIter = 1000;
  constexpr double kTol = 1e-6;

  for (int it = 0; it < kMaxIter; ++it) {
    Eigen::VectorXd g = logistic_gradient(params, X, y, reg);
    if (g.lpNorm<Eigen::Infinity>() <= kTol) break;

    // Newton step; the Hessian of the mean loss is PSD plus the ridge term
    // on the weight block.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d + 1, d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = sigmoid(X.row(i).dot(params.head(d)) + params(d));
      const double s = std::max(p * (1.0 - p), 1e-12);
      Eigen::VectorXd xi(d + 1);
      xi.head(d) = X.row(i).transpose();
      xi(d) = 1.0;
      h.noalias() += s * xi * xi.transpose();
    }
    h.topLeftCorner(d, d).diagonal().array() += reg;
    h /= static_cast<double>(n);

    Eigen::VectorXd step = h.ldlt().solve(g);

    // Backtracking keeps Newton globally convergent on this objective.
    double f0 = logistic_objective(params, X, y, reg);
    double alpha = 1.0;
    for (int ls = 0; ls < 50; ++ls) {
      Eigen::VectorXd cand = params - alpha * step;
      if (logistic_objective(cand, X, y, reg) <= f0) {
        params = cand;
        break;
      }
      alpha *= 0.5;
    }
  }
  params_ = params;
}

Eigen::MatrixXd LogisticRegression::predict_proba(
    const Eigen::MatrixXd& X) const {
  if (params_.size() == 0) throw std::logic_error("predict before fit");
  const Eigen::Index d = X.cols();
  if (d + 1 != params_.size()) {
    throw std::invalid_argument("predict_proba: feature width mismatch");
  }
  Eigen::MatrixXd out(X.rows(), 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double p = sigmoid(X.row(i).dot(params_.head(d)) + params_(d));
    out(i, 1) = p;
    out(i, 0) = 1.0 - p;
  }
  return out;
}

}  // namespace uqbench
