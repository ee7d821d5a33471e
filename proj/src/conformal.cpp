#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uqbench/uq.hpp"

namespace uqbench {

ConformalState conformal_fit(const Predictor& model,
                             const Eigen::MatrixXd& X_cal,
                             const std::vector<int>& y_cal) {
  if (static_cast<std::size_t>(X_cal.rows()) != y_cal.size()) {
    throw std::invalid_argument("conformal_fit: length mismatch");
  }
  Eigen::MatrixXd proba = model.predict_proba(X_cal);
  ConformalState state;
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    const int y = y_cal[i];
    state.scores[y].push_back(1.0 - proba(i, y));
  }
  for (int c = 0; c < 2; ++c) {
    std::sort(state.scores[c].begin(), state.scores[c].end());
    state.usable[c] = !state.scores[c].empty();
  }
  return state;
}

Eigen::MatrixXd conformal_pvalues(const ConformalState& state,
                                  const Predictor& model,
                                  const Eigen::MatrixXd& X) {
  Eigen::MatrixXd proba = model.predict_proba(X);
  Eigen::MatrixXd pvals(X.rows(), 2);
  for (int c = 0; c < 2; ++c) {
    if (!state.usable[c]) {
      pvals.col(c).setConstant(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const std::vector<double>& cal = state.scores[c];
    const double n_c = static_cast<double>(cal.size());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double a = 1.0 - proba(i, c);
      const std::size_t below =
          std::lower_bound(cal.begin(), cal.end(), a) - cal.begin();
      const double ge = n_c - static_cast<double>(below);
      pvals(i, c) = (ge + 1.0) / (n_c + 1.0);
    }
  }
  return pvals;
}

ConformalScoreTriple conformal_scores(const Eigen::Vector2d& pvals,
                                      int predicted_class) {
  if (!std::isfinite(pvals(0)) || !std::isfinite(pvals(1))) {
    throw std::runtime_error("conformal_scores: missing p-value for a class");
  }
  const double p_max = std::max(pvals(0), pvals(1));
  const double p_second = std::min(pvals(0), pvals(1));
  return {1.0 - pvals(predicted_class), 1.0 - p_max, p_second};
}

Eigen::VectorXd ConformalScorer::score(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd pvals = conformal_pvalues(state_, *model_, X);
  std::vector<int> preds = predict_labels(*model_, X);
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const ConformalScoreTriple t =
        conformal_scores(pvals.row(i).transpose(), preds[i]);
    switch (kind_) {
      case ConformalScoreKind::p_value:
        out(i) = t.u_pvalue;
        break;
      case ConformalScoreKind::credibility:
        out(i) = t.u_credibility;
        break;
      case ConformalScoreKind::confidence:
        out(i) = t.u_confidence;
        break;
    }
  }
  return out;
}

std::string ConformalScorer::name() const {
  switch (kind_) {
    case ConformalScoreKind::p_value:
      return "cp_p_value";
    case ConformalScoreKind::credibility:
      return "cp_credibility";
    case ConformalScoreKind::confidence:
      return "cp_confidence";
  }
  return "cp";
}

double binary_entropy(double p1) {
  const double a = clamp_prob(p1);
  const double b = clamp_prob(1.0 - p1);
  return -(a * std::log(a) + b * std::log(b));
}

std::vector<UncertaintyTriple> ensemble_decomposition(
    const DeepEnsemble& model, const Eigen::MatrixXd& X) {
  const std::vector<Eigen::MatrixXd> members = model.member_proba(X);
  const double m = static_cast<double>(members.size());
  std::vector<UncertaintyTriple> out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double mean_p1 = 0.0;
    double aleatoric = 0.0;
    for (const Eigen::MatrixXd& proba : members) {
      mean_p1 += proba(i, 1);
      aleatoric += binary_entropy(proba(i, 1));
    }
    mean_p1 /= m;
    aleatoric /= m;
    const double total = binary_entropy(mean_p1);
    out[i] = {total, aleatoric, total - aleatoric};
  }
  return out;
}

Eigen::VectorXd EnsembleUncertaintyScorer::score(
    const Eigen::MatrixXd& X) const {
  const std::vector<UncertaintyTriple> triples =
      ensemble_decomposition(*model_, X);
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    switch (kind_) {
      case EnsembleScoreKind::total:
        out(i) = triples[i].total;
        break;
      case EnsembleScoreKind::aleatoric:
        out(i) = triples[i].aleatoric;
        break;
      case EnsembleScoreKind::epistemic:
        out(i) = triples[i].epistemic;
        break;
    }
  }
  return out;
}

std::string EnsembleUncertaintyScorer::name() const {
  switch (kind_) {
    case EnsembleScoreKind::total:
      return "total";
    case EnsembleScoreKind::aleatoric:
      return "aleatoric";
    case EnsembleScoreKind::epistemic:
      return "epistemic";
  }
  return "ensemble";
}

}  // namespace uqbench
