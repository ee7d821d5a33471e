#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uqbench/models.hpp"

namespace uqbench {

void KnnAnomalyModel::fit(const Eigen::MatrixXd& X, const std::vector<int>& y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) {
    throw std::invalid_argument("KnnAnomalyModel::fit: length mismatch");
  }
  if (k_ < 1) throw std::invalid_argument("KnnAnomalyModel: k must be >= 1");
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::Index count = 0;
    for (int v : y) count += (v == cls);
    points_[cls].resize(count, X.cols());
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (y[i] == cls) points_[cls].row(r++) = X.row(i);
    }
  }
  if (points_[0].rows() == 0 && points_[1].rows() == 0) {
    throw std::invalid_argument("KnnAnomalyModel::fit: empty training set");
  }
}

double KnnAnomalyModel::score(const Eigen::VectorXd& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (int cls = 0; cls < 2; ++cls) {
    const Eigen::MatrixXd& pts = points_[cls];
    if (pts.rows() == 0) continue;  // class entirely absent: skip
    const Eigen::Index kc =
        std::min<Eigen::Index>(k_, pts.rows());  // clamp rule
    Eigen::VectorXd d2 =
        (pts.rowwise() - x.transpose()).rowwise().squaredNorm();
    std::vector<double> d(d2.data(), d2.data() + d2.size());
    std::nth_element(d.begin(), d.begin() + (kc - 1), d.end());
    double mean = 0.0;
    // nth_element leaves the kc smallest in the front block
    for (Eigen::Index i = 0; i < kc; ++i) mean += std::sqrt(d[i]);
    mean /= static_cast<double>(kc);
    best = std::min(best, mean);
  }
  return best;
}

Eigen::VectorXd KnnAnomalyModel::score_all(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out(i) = score(X.row(i).transpose());
  }
  return out;
}

}  // namespace uqbench
