#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "uqbench/uq.hpp"

namespace uqbench {

Eigen::VectorXd max_confidence_score(const Predictor& model,
                                     const Eigen::MatrixXd& X) {
  Eigen::MatrixXd proba = model.predict_proba(X);
  return Eigen::VectorXd::Ones(proba.rows()) - proba.rowwise().maxCoeff();
}

IsotonicCalibrator IsotonicCalibrator::fit(const std::vector<double>& raw_probs,
                                           const std::vector<int>& outcomes) {
  if (raw_probs.size() != outcomes.size()) {
    throw std::invalid_argument("IsotonicCalibrator::fit: length mismatch");
  }
  if (raw_probs.size() < 2) {
    throw std::invalid_argument(
        "IsotonicCalibrator::fit: needs at least 2 calibration points");
  }

  std::vector<std::size_t> order(raw_probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw_probs[a] < raw_probs[b];
  });

  // Pool tied x values to their mean outcome first.
  std::vector<double> xs, ys, ws;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < order.size() &&
           raw_probs[order[j]] == raw_probs[order[i]]) {
      sum += outcomes[order[j]];
      ++j;
    }
    xs.push_back(raw_probs[order[i]]);
    ys.push_back(sum / static_cast<double>(j - i));
    ws.push_back(static_cast<double>(j - i));
    i = j;
  }

  // Pool-adjacent-violators over the weighted points.
  struct Block {
    double mean, weight;
    std::size_t last;  // index of the last pooled x
  };
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    blocks.push_back({ys[k], ws[k], k});
    while (blocks.size() >= 2 &&
           blocks[blocks.size() - 2].mean >= blocks.back().mean) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      a.mean = (a.mean * a.weight + b.mean * b.weight) / (a.weight + b.weight);
      a.weight += b.weight;
      a.last = b.last;
    }
  }

  IsotonicCalibrator cal;
  std::size_t first = 0;
  for (const Block& b : blocks) {
    for (std::size_t k = first; k <= b.last; ++k) {
      cal.knots_.push_back(xs[k]);
      cal.values_.push_back(std::clamp(b.mean, 0.0, 1.0));
    }
    first = b.last + 1;
  }
  return cal;
}

double IsotonicCalibrator::predict(double raw_prob) const {
  if (knots_.empty()) throw std::logic_error("predict before fit");
  if (raw_prob <= knots_.front()) return values_.front();
  if (raw_prob >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), raw_prob);
  const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
  const std::size_t lo = hi - 1;
  const double t = (raw_prob - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

IsotonicMaxConfidenceScorer IsotonicMaxConfidenceScorer::fit(
    std::shared_ptr<const Predictor> model, const Eigen::MatrixXd& X_cal,
    const std::vector<int>& y_cal) {
  Eigen::MatrixXd proba = model->predict_proba(X_cal);
  std::vector<double> raw(proba.rows());
  for (Eigen::Index i = 0; i < proba.rows(); ++i) raw[i] = proba(i, 1);
  IsotonicCalibrator cal = IsotonicCalibrator::fit(raw, y_cal);
  return IsotonicMaxConfidenceScorer(std::move(model), std::move(cal));
}

Eigen::VectorXd IsotonicMaxConfidenceScorer::score(
    const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd proba = model_->predict_proba(X);
  Eigen::VectorXd out(proba.rows());
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    const double p1 = calibrator_.predict(proba(i, 1));
    out(i) = 1.0 - std::max(p1, 1.0 - p1);
  }
  return out;
}

}  // namespace uqbench
