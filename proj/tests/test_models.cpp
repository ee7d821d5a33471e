#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "uqbench/models.hpp"
#include "uqbench/rng.hpp"
#include "uqbench/synth.hpp"

using namespace uqbench;

namespace {

void check_row_stochastic(const Eigen::MatrixXd& proba) {
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    CHECK(proba(i, 0) >= 0.0);
    CHECK(proba(i, 1) >= 0.0);
    CHECK(proba.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

// Central finite differences of a scalar function of a flat parameter
// vector.
template <typename F>
Eigen::VectorXd finite_diff(F f, const Eigen::VectorXd& at, double h = 1e-6) {
  Eigen::VectorXd g(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Eigen::VectorXd hi = at, lo = at;
    hi(i) += h;
    lo(i) -= h;
    g(i) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("logistic separates a separable pair") {
  Eigen::MatrixXd X(2, 1);
  X << -1.0, 1.0;
  LogisticRegression lr;
  lr.fit(X, {0, 1}, 0);
  Eigen::MatrixXd p = lr.predict_proba(X);
  check_row_stochastic(p);
  CHECK(p(1, 1) > 0.5);
  CHECK(p(0, 1) < 0.5);
}

TEST_CASE("logistic intercept-only fit recovers the class prior") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(100, 2);
  std::vector<int> y(100, 0);
  for (int i = 0; i < 30; ++i) y[i] = 1;
  LogisticRegression lr;
  lr.fit(X, y, 0);
  Eigen::MatrixXd p = lr.predict_proba(X);
  CHECK(p(0, 1) == doctest::Approx(0.3).epsilon(1e-3));
}

TEST_CASE("logistic gradient matches central finite differences") {
  Rng rng(5);
  Eigen::MatrixXd X(20, 3);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y[i] = static_cast<int>(rng.index(2));
  }
  Eigen::VectorXd params(4);
  for (int i = 0; i < 4; ++i) params(i) = rng.normal() * 0.5;

  Eigen::VectorXd g = logistic_gradient(params, X, y);
  Eigen::VectorXd fd = finite_diff(
      [&](const Eigen::VectorXd& p) { return logistic_objective(p, X, y); },
      params);
  CHECK((g - fd).lpNorm<Eigen::Infinity>() /
            std::max(1.0, fd.lpNorm<Eigen::Infinity>()) <=
        1e-5);
}

TEST_CASE("logistic gradient at the fitted optimum is small") {
  Rng rng(17);
  Eigen::MatrixXd X(200, 2);
  std::vector<int> y(200);
  for (int i = 0; i < 200; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    y[i] = (X(i, 0) + 0.5 * rng.normal() > 0) ? 1 : 0;
  }
  LogisticRegression lr;
  lr.fit(X, y, 0);
  CHECK(logistic_gradient(lr.params(), X, y).lpNorm<Eigen::Infinity>() <=
        1e-6);
}

TEST_CASE("logistic rejects bad inputs") {
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 1.0;
  LogisticRegression lr;
  CHECK_THROWS(lr.fit(X, {1, 1}, 0));  // single class
  Eigen::MatrixXd bad = X;
  bad(0, 0) = std::nan("");
  CHECK_THROWS(lr.fit(bad, {0, 1}, 0));
}

TEST_CASE("mlp learns XOR") {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 0, 1, 1, 0, 1, 1;
  std::vector<int> y = {0, 1, 1, 0};
  MlpConfig cfg;
  cfg.max_epochs = 4000;  // 4 samples = 1 step per epoch at default lr
  Mlp mlp(cfg);
  mlp.fit(X, y, 3);
  std::vector<int> preds = predict_labels(mlp, X);
  CHECK(preds == y);
}

TEST_CASE("mlp is deterministic given the seed") {
  GaussianSample data = make_two_gaussians(120, 2.0, 21);
  MlpConfig cfg;
  cfg.hidden = 16;
  cfg.max_epochs = 30;
  Mlp a(cfg), b(cfg);
  a.fit(data.X, data.y, 7);
  b.fit(data.X, data.y, 7);
  Eigen::MatrixXd pa = a.predict_proba(data.X);
  Eigen::MatrixXd pb = b.predict_proba(data.X);
  CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);  // bitwise identical
  check_row_stochastic(pa);
}

TEST_CASE("mlp gradient of a 2-unit network matches finite differences") {
  Rng rng(9);
  Eigen::MatrixXd X(8, 3);
  std::vector<int> y(8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y[i] = static_cast<int>(rng.index(2));
  }
  MlpParams p;
  p.w1 = Eigen::MatrixXd(2, 3);
  p.b1 = Eigen::VectorXd(2);
  p.w2 = Eigen::MatrixXd(2, 2);
  p.b2 = Eigen::VectorXd(2);
  // Offsets keep every ReLU away from its kink so the loss is smooth at p.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) p.w1(i, j) = 0.3 * rng.normal();
    p.b1(i) = 1.0 + 0.1 * rng.uniform();
    for (int j = 0; j < 2; ++j) p.w2(i, j) = 0.3 * rng.normal();
    p.b2(i) = 0.1 * rng.normal();
  }

  auto flatten = [](const MlpParams& q) {
    Eigen::VectorXd v(6 + 2 + 4 + 2);
    int k = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) v(k++) = q.w1(i, j);
    for (int i = 0; i < 2; ++i) v(k++) = q.b1(i);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) v(k++) = q.w2(i, j);
    for (int i = 0; i < 2; ++i) v(k++) = q.b2(i);
    return v;
  };
  auto unflatten = [](const Eigen::VectorXd& v) {
    MlpParams q;
    q.w1 = Eigen::MatrixXd(2, 3);
    q.b1 = Eigen::VectorXd(2);
    q.w2 = Eigen::MatrixXd(2, 2);
    q.b2 = Eigen::VectorXd(2);
    int k = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) q.w1(i, j) = v(k++);
    for (int i = 0; i < 2; ++i) q.b1(i) = v(k++);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) q.w2(i, j) = v(k++);
    for (int i = 0; i < 2; ++i) q.b2(i) = v(k++);
    return q;
  };

  Eigen::VectorXd flat = flatten(p);
  Eigen::VectorXd g = flatten(mlp_gradient(p, X, y));
  Eigen::VectorXd fd = finite_diff(
      [&](const Eigen::VectorXd& v) { return mlp_loss(unflatten(v), X, y); },
      flat);
  const double rel = (g - fd).lpNorm<Eigen::Infinity>() /
                     std::max(1.0, fd.lpNorm<Eigen::Infinity>());
  CHECK(rel <= 1e-5);
}

TEST_CASE("deep ensemble mean consistency and member diversity") {
  GaussianSample data = make_two_gaussians(150, 1.0, 33);
  MlpConfig cfg;
  cfg.hidden = 8;
  cfg.max_epochs = 20;
  DeepEnsemble ens(4, cfg);
  ens.fit(data.X, data.y, 11);

  Eigen::MatrixXd mean = ens.predict_proba(data.X);
  check_row_stochastic(mean);
  std::vector<Eigen::MatrixXd> members = ens.member_proba(data.X);
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(mean.rows(), 2);
  for (const auto& m : members) avg += m;
  avg /= static_cast<double>(members.size());
  CHECK((mean - avg).cwiseAbs().maxCoeff() <= 1e-9);

  // Distinct derived seeds produce non-identical members.
  bool differ = false;
  for (std::size_t m = 1; m < members.size() && !differ; ++m) {
    differ = (members[m] - members[0]).cwiseAbs().maxCoeff() > 0.0;
  }
  CHECK(differ);
}

TEST_CASE("ensemble of forced-identical members has zero spread") {
  GaussianSample data = make_two_gaussians(80, 1.5, 40);
  MlpConfig cfg;
  cfg.hidden = 8;
  cfg.max_epochs = 10;
  DeepEnsemble ens(3, cfg);
  ens.fit(data.X, data.y, 5);
  // Force every member to the first member's weights.
  for (std::size_t m = 1; m < ens.members().size(); ++m) {
    ens.members()[m].set_params(ens.members()[0].params());
  }
  std::vector<Eigen::MatrixXd> members = ens.member_proba(data.X);
  for (std::size_t m = 1; m < members.size(); ++m) {
    CHECK((members[m] - members[0]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("deep ensemble rejects M < 2") {
  CHECK_THROWS(DeepEnsemble(1));
}

TEST_CASE("knn anomaly score basics") {
  // x equal to a train point with k identical same-label copies -> 0.
  Eigen::MatrixXd X(4, 2);
  X << 1, 1, 1, 1, 5, 5, 6, 6;
  KnnAnomalyModel knn(2);
  knn.fit(X, {0, 0, 1, 1});
  Eigen::VectorXd q(2);
  q << 1, 1;
  CHECK(knn.score(q) == doctest::Approx(0.0));

  // x at distance d from every train point -> score d.
  Eigen::MatrixXd ring(4, 2);
  ring << 1, 0, -1, 0, 0, 1, 0, -1;
  KnnAnomalyModel knn2(2);
  knn2.fit(ring, {0, 0, 1, 1});
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
  CHECK(knn2.score(origin) == doctest::Approx(1.0));
}

TEST_CASE("knn matches brute-force oracle and clamps k") {
  Rng rng(77);
  Eigen::MatrixXd X(7, 2);
  std::vector<int> y = {0, 0, 0, 1, 1, 1, 1};
  for (int i = 0; i < 7; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
  }
  KnnAnomalyModel knn(2);
  knn.fit(X, y);

  Eigen::VectorXd q(2);
  q << 0.3, -0.8;
  // Brute force: all pairwise distances, per class mean of 2 smallest.
  double best = 1e300;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<double> d;
    for (int i = 0; i < 7; ++i) {
      if (y[i] == cls) d.push_back((X.row(i).transpose() - q).norm());
    }
    std::sort(d.begin(), d.end());
    best = std::min(best, (d[0] + d[1]) / 2.0);
  }
  CHECK(knn.score(q) == doctest::Approx(best).epsilon(1e-12));

  // k larger than any class count clamps to the class size.
  KnnAnomalyModel wide(50);
  wide.fit(X, y);
  double best_all = 1e300;
  for (int cls = 0; cls < 2; ++cls) {
    double sum = 0.0;
    int cnt = 0;
    for (int i = 0; i < 7; ++i) {
      if (y[i] == cls) {
        sum += (X.row(i).transpose() - q).norm();
        ++cnt;
      }
    }
    best_all = std::min(best_all, sum / cnt);
  }
  CHECK(wide.score(q) == doctest::Approx(best_all).epsilon(1e-12));
}

TEST_CASE("knn score is translation invariant") {
  Rng rng(91);
  Eigen::MatrixXd X(10, 3);
  std::vector<int> y(10);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y[i] = i % 2;
  }
  Eigen::VectorXd q(3), shift(3);
  q << 0.1, 0.2, -0.5;
  shift << 10.0, -3.0, 2.5;

  KnnAnomalyModel a(3), b(3);
  a.fit(X, y);
  b.fit(X.rowwise() + shift.transpose(), y);
  CHECK(a.score(q) == doctest::Approx(b.score(q + shift)).epsilon(1e-9));
}

TEST_CASE("model persistence round-trips bit-exactly") {
  const auto dir = std::filesystem::temp_directory_path();
  GaussianSample data = make_two_gaussians(100, 1.5, 50);

  LogisticRegression lr;
  lr.fit(data.X, data.y, 0);
  const std::string lr_path = (dir / "uqbench_lr.json").string();
  save_model(lr, lr_path);
  auto lr2 = load_model(lr_path);
  CHECK((lr.predict_proba(data.X) - lr2->predict_proba(data.X))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  MlpConfig cfg;
  cfg.hidden = 8;
  cfg.max_epochs = 10;
  DeepEnsemble ens(2, cfg);
  ens.fit(data.X, data.y, 1);
  const std::string ens_path = (dir / "uqbench_ens.json").string();
  save_model(ens, ens_path);
  auto ens2 = load_model(ens_path);
  CHECK((ens.predict_proba(data.X) - ens2->predict_proba(data.X))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}
