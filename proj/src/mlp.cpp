#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uqbench/models.hpp"
#include "uqbench/rng.hpp"

namespace uqbench {
namespace {

// Row-wise softmax of logits (N x 2).
Eigen::MatrixXd softmax(const Eigen::MatrixXd& z) {
  Eigen::MatrixXd out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    Eigen::RowVectorXd e = (z.row(i).array() - m).exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

struct Forward {
  Eigen::MatrixXd hidden;  // N x H, post-ReLU
  Eigen::MatrixXd proba;   // N x 2
};

Forward forward(const MlpParams& p, const Eigen::MatrixXd& X) {
  Forward f;
  f.hidden = ((X * p.w1.transpose()).rowwise() + p.b1.transpose())
                 .cwiseMax(0.0);
  f.proba = softmax((f.hidden * p.w2.transpose()).rowwise() +
                    p.b2.transpose());
  return f;
}

double glorot_limit(Eigen::Index fan_in, Eigen::Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void fill_uniform(Eigen::MatrixXd& m, double limit, Rng& rng) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
    }
  }
}

struct Adam {
  MlpParams m, v;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long t = 0;

  explicit Adam(const MlpParams& shape) {
    auto zeros_like = [](const MlpParams& p) {
      MlpParams z;
      z.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
      z.b1 = Eigen::VectorXd::Zero(p.b1.size());
      z.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
      z.b2 = Eigen::VectorXd::Zero(p.b2.size());
      return z;
    };
    m = zeros_like(shape);
    v = zeros_like(shape);
  }

  void step(MlpParams& p, const MlpParams& g, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    auto upd = [&](Eigen::MatrixXd& param, Eigen::MatrixXd& mm,
                   Eigen::MatrixXd& vv, const Eigen::MatrixXd& grad) {
      mm = beta1 * mm + (1.0 - beta1) * grad;
      vv = beta2 * vv + (1.0 - beta2) * grad.cwiseProduct(grad);
      param.array() -=
          lr * (mm.array() / c1) / ((vv.array() / c2).sqrt() + eps);
    };
    auto updv = [&](Eigen::VectorXd& param, Eigen::VectorXd& mm,
                    Eigen::VectorXd& vv, const Eigen::VectorXd& grad) {
      mm = beta1 * mm + (1.0 - beta1) * grad;
      vv = beta2 * vv + (1.0 - beta2) * grad.cwiseProduct(grad);
      param.array() -=
          lr * (mm.array() / c1) / ((vv.array() / c2).sqrt() + eps);
    };
    upd(p.w1, m.w1, v.w1, g.w1);
    updv(p.b1, m.b1, v.b1, g.b1);
    upd(p.w2, m.w2, v.w2, g.w2);
    updv(p.b2, m.b2, v.b2, g.b2);
  }
};

}  // namespace

double mlp_loss(const MlpParams& p, const Eigen::MatrixXd& X,
                const std::vector<int>& y) {
  const Forward f = forward(p, X);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    loss -= std::log(clamp_prob(f.proba(i, y[i])));
  }
  return loss / static_cast<double>(X.rows());
}

MlpParams mlp_gradient(const MlpParams& p, const Eigen::MatrixXd& X,
                       const std::vector<int>& y) {
  const Eigen::Index n = X.rows();
  const Forward f = forward(p, X);

  Eigen::MatrixXd dlogits = f.proba;  // N x 2
  for (Eigen::Index i = 0; i < n; ++i) dlogits(i, y[i]) -= 1.0;
  dlogits /= static_cast<double>(n);

  MlpParams g;
  g.w2 = dlogits.transpose() * f.hidden;
  g.b2 = dlogits.colwise().sum().transpose();
  Eigen::MatrixXd dhidden = dlogits * p.w2;  // N x H
  dhidden = dhidden.cwiseProduct(
      (f.hidden.array() > 0.0).cast<double>().matrix());
  g.w1 = dhidden.transpose() * X;
  g.b1 = dhidden.colwise().sum().transpose();
  return g;
}

void Mlp::fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
              std::uint64_t seed) {
  check_fit_inputs(X, y);
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const Eigen::Index h = config_.hidden;

  Rng rng(seed);
  MlpParams p;
  p.w1 = Eigen::MatrixXd(h, d);
  p.b1 = Eigen::VectorXd::Zero(h);
  p.w2 = Eigen::MatrixXd(2, h);
  p.b2 = Eigen::VectorXd::Zero(2);
  fill_uniform(p.w1, glorot_limit(d, h), rng);
  fill_uniform(p.w2, glorot_limit(h, 2), rng);

  const Eigen::Index batch =
      std::min<Eigen::Index>(config_.batch_size_cap, n);
  Adam adam(p);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> history;

  for (int epoch = 0; epoch < config_.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index m = std::min(batch, n - start);
      Eigen::MatrixXd xb(m, d);
      std::vector<int> yb(m);
      for (Eigen::Index i = 0; i < m; ++i) {
        xb.row(i) = X.row(order[start + i]);
        yb[i] = y[order[start + i]];
      }
      adam.step(p, mlp_gradient(p, xb, yb), config_.learning_rate);
    }
    history.push_back(mlp_loss(p, X, y));
    const int lag = config_.plateau_epochs;
    if (epoch >= lag) {
      const double prev = history[epoch - lag];
      if (prev - history[epoch] < config_.plateau_tol * std::abs(prev)) break;
    }
  }
  params_ = std::move(p);
}

Eigen::MatrixXd Mlp::predict_proba(const Eigen::MatrixXd& X) const {
  if (params_.w1.size() == 0) throw std::logic_error("predict before fit");
  if (X.cols() != params_.w1.cols()) {
    throw std::invalid_argument("predict_proba: feature width mismatch");
  }
  return forward(params_, X).proba;
}

DeepEnsemble::DeepEnsemble(int members, MlpConfig config) {
  if (members < 2) {
    throw std::invalid_argument("DeepEnsemble requires at least 2 members");
  }
  members_.assign(members, Mlp(config));
}

void DeepEnsemble::fit(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       std::uint64_t seed) {
  for (std::size_t m = 0; m < members_.size(); ++m) {
    members_[m].fit(X, y, Rng::derive(seed, m));
  }
}

std::vector<Eigen::MatrixXd> DeepEnsemble::member_proba(
    const Eigen::MatrixXd& X) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(members_.size());
  for (const Mlp& m : members_) out.push_back(m.predict_proba(X));
  return out;
}

Eigen::MatrixXd DeepEnsemble::predict_proba(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(X.rows(), 2);
  for (const Mlp& m : members_) mean += m.predict_proba(X);
  return mean / static_cast<double>(members_.size());
}

}  // namespace uqbench
