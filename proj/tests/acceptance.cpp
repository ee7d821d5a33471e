// Acceptance gate: one line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "uqbench/bench.hpp"
#include "uqbench/metrics.hpp"
#include "uqbench/preprocess.hpp"
#include "uqbench/rng.hpp"
#include "uqbench/splits.hpp"
#include "uqbench/synth.hpp"
#include "uqbench/tasks.hpp"
#include "uqbench/uq.hpp"

using namespace uqbench;

namespace {

int g_failures = 0;

void report(bool ok, const char* name) {
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Deep ensemble with pinned member distributions (zero weights, logits in
// the output bias).
DeepEnsemble make_fixed_ensemble(const std::vector<double>& member_p1) {
  MlpConfig cfg;
  cfg.hidden = 2;
  cfg.max_epochs = 1;
  DeepEnsemble ens(static_cast<int>(member_p1.size()), cfg);
  Eigen::MatrixXd X(4, 1);
  X << 0, 1, 0, 1;
  ens.fit(X, {0, 1, 0, 1}, 0);
  for (std::size_t m = 0; m < member_p1.size(); ++m) {
    const double p1 = clamp_prob(member_p1[m]);
    MlpParams p;
    p.w1 = Eigen::MatrixXd::Zero(2, 1);
    p.b1 = Eigen::VectorXd::Zero(2);
    p.w2 = Eigen::MatrixXd::Zero(2, 2);
    p.b2 = Eigen::VectorXd(2);
    p.b2 << std::log(1.0 - p1), std::log(p1);
    ens.members()[m].set_params(std::move(p));
  }
  return ens;
}

// One fitted logistic cell over the synthetic census data with the full
// scorer battery, used by the per-cell criteria.
struct Cell {
  Eigen::MatrixXd X_test;
  std::vector<int> y_test;
  std::shared_ptr<const Predictor> model;
  std::vector<std::shared_ptr<const UncertaintyScorer>> scorers;
  std::shared_ptr<const KnnAnomalyModel> knn;
};

Cell fit_cell(const TabularDataset& in_dist, const TabularDataset& ood,
              std::uint64_t seed) {
  DataSplits splits = make_splits(in_dist, ood, {0.6, 0.2, 0.2}, seed);
  Preprocessor pre = Preprocessor::fit(splits.train);
  Eigen::MatrixXd X_train = pre.transform(splits.train);
  Eigen::MatrixXd X_cal = pre.transform(splits.calibration);

  Cell cell;
  cell.X_test = pre.transform(splits.test);
  cell.y_test = splits.test.labels();

  auto lr = std::make_shared<LogisticRegression>();
  lr->fit(X_train, splits.train.labels(), seed);
  cell.model = lr;

  auto knn = std::make_shared<KnnAnomalyModel>(10);
  knn->fit(X_train, splits.train.labels());
  cell.knn = knn;

  const std::vector<int>& y_cal = splits.calibration.labels();
  ConformalState cp = conformal_fit(*cell.model, X_cal, y_cal);
  cell.scorers = {
      std::make_shared<MaxConfidenceScorer>(cell.model),
      std::make_shared<IsotonicMaxConfidenceScorer>(
          IsotonicMaxConfidenceScorer::fit(cell.model, X_cal, y_cal)),
      std::make_shared<ConformalScorer>(cell.model, cp,
                                        ConformalScoreKind::p_value),
      std::make_shared<ConformalScorer>(cell.model, cp,
                                        ConformalScoreKind::credibility),
      std::make_shared<ConformalScorer>(cell.model, cp,
                                        ConformalScoreKind::confidence),
      std::make_shared<KnnScorer>(cell.knn),
  };
  return cell;
}

// --------------------------------------------------------------------------

bool conformal_coverage() {
  const auto t0 = std::chrono::steady_clock::now();
  double coverage_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GaussianSample train = make_two_gaussians(2000, 2.0, Rng::derive(seed, 1));
    GaussianSample cal = make_two_gaussians(1000, 2.0, Rng::derive(seed, 2));
    GaussianSample test = make_two_gaussians(1000, 2.0, Rng::derive(seed, 3));
    LogisticRegression lr;
    lr.fit(train.X, train.y, seed);
    ConformalState st = conformal_fit(lr, cal.X, cal.y);
    Eigen::MatrixXd P = conformal_pvalues(st, lr, test.X);
    double covered = 0.0;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      if (P(i, test.y[static_cast<std::size_t>(i)]) > 0.1) covered += 1.0;
    }
    coverage_sum += covered / static_cast<double>(P.rows());
  }
  const double mean_cov = coverage_sum / 20.0;
  const double dt = seconds_since(t0);
  std::printf("  conformal coverage at alpha=0.1: %.4f (%.1fs)\n", mean_cov,
              dt);
  return mean_cov >= 0.88 && dt < 30.0;
}

bool isotonic_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.index(7);
    std::vector<double> probs(n), ys(n);
    std::vector<int> outcomes(n);
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      outcomes[i] = static_cast<int>(rng.index(2));
      ys[i] = outcomes[i];
    }
    IsotonicCalibrator iso = IsotonicCalibrator::fit(probs, outcomes);
    std::vector<double> oracle = oracles::brute_force_isotonic(ys);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(iso.predict(probs[i]) - oracle[i]) > 1e-9) return false;
    }
  }
  return seconds_since(t0) < 5.0;
}

bool auroc_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.index(49);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    labels[0] = 0;
    labels[n - 1] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.index(6)) / 5.0;
      if (i > 0 && i + 1 < n) labels[i] = static_cast<int>(rng.index(2));
    }
    auto got = auroc(scores, labels);
    if (!got) return false;
    if (std::abs(*got - oracles::pair_counting_auroc(scores, labels)) > 1e-12) {
      return false;
    }
  }
  return seconds_since(t0) < 5.0;
}

bool decomposition_identities() {
  Rng rng(3);
  for (int rep = 0; rep < 1000; ++rep) {
    const int m = 2 + static_cast<int>(rng.index(9));
    std::vector<double> p1s(m);
    for (double& p : p1s) p = rng.uniform();
    DeepEnsemble ens = make_fixed_ensemble(p1s);
    auto t = ensemble_decomposition(ens, Eigen::MatrixXd::Zero(1, 1))[0];
    if (std::abs(t.total - t.aleatoric - t.epistemic) > 1e-12) return false;
    if (t.epistemic < -1e-12) return false;
    if (t.total > std::log(2.0) + 1e-12) return false;
  }
  return true;
}

bool ks_null_behavior(const std::vector<Cell>& cells) {
  for (const Cell& cell : cells) {
    for (const auto& scorer : cell.scorers) {
      TaskInput in;
      in.model = cell.model.get();
      in.scorer = scorer.get();
      in.X_test = cell.X_test;
      in.y_test = cell.y_test;
      in.X_shifted = cell.X_test;  // null: shifted is an exact copy
      in.y_shifted = cell.y_test;
      in.rng_seed = 17;
      const double rate = shift_detection(in, 100, 0.05);
      if (rate > 0.12) {
        std::printf("  null detection %.3f for %s\n", rate,
                    scorer->name().c_str());
        return false;
      }
    }
  }
  // Disjoint supports: push the shifted rows far outside the training hull
  // so the kNN distance distributions cannot overlap.
  const Cell& cell = cells.front();
  TaskInput far;
  KnnScorer knn(cell.knn);
  far.model = cell.model.get();
  far.scorer = &knn;
  far.X_test = cell.X_test;
  far.y_test = cell.y_test;
  far.X_shifted = cell.X_test.array() + 1e4;
  far.y_shifted = cell.y_test;
  far.rng_seed = 17;
  return shift_detection(far, 100, 0.05) == 1.0;
}

bool atc_self_consistency(const std::vector<Cell>& cells) {
  for (const Cell& cell : cells) {
    const std::vector<int> preds = predict_labels(*cell.model, cell.X_test);
    const std::size_t n = cell.y_test.size();
    for (const auto& scorer : cell.scorers) {
      Eigen::VectorXd u = scorer->score(cell.X_test);
      std::vector<double> uv(u.data(), u.data() + u.size());
      AtcState st = atc_fit(uv, preds, cell.y_test);
      const double est = atc_estimate(st, uv);
      if (std::abs(est - st.test_error_rate) >
          1.0 / static_cast<double>(n) + 1e-12) {
        std::printf("  atc drift %.5f vs %.5f for %s\n", est,
                    st.test_error_rate, scorer->name().c_str());
        return false;
      }
    }
  }
  return true;
}

bool retention_endpoints(const std::vector<Cell>& cells) {
  for (const Cell& cell : cells) {
    const std::vector<int> preds = predict_labels(*cell.model, cell.X_test);
    const double model_f1 = f1_score(preds, cell.y_test);
    for (const auto& scorer : cell.scorers) {
      TaskInput in;
      in.model = cell.model.get();
      in.scorer = scorer.get();
      in.X_test = cell.X_test;
      in.y_test = cell.y_test;
      RetentionCurve curve = retention(in);
      if (curve.f1_values.back() != 1.0) return false;
      if (std::abs(curve.f1_values.front() - model_f1) > 1e-12) return false;
    }
  }
  return true;
}

bool gradient_checks() {
  Rng rng(4);
  // Logistic.
  {
    Eigen::MatrixXd X(25, 3);
    std::vector<int> y(25);
    for (int i = 0; i < 25; ++i) {
      for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
      y[i] = static_cast<int>(rng.index(2));
    }
    Eigen::VectorXd params(4);
    for (int i = 0; i < 4; ++i) params(i) = 0.4 * rng.normal();
    Eigen::VectorXd g = logistic_gradient(params, X, y);
    Eigen::VectorXd fd(4);
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd hi = params, lo = params;
      hi(i) += 1e-6;
      lo(i) -= 1e-6;
      fd(i) = (logistic_objective(hi, X, y) - logistic_objective(lo, X, y)) /
              2e-6;
    }
    const double rel = (g - fd).lpNorm<Eigen::Infinity>() /
                       std::max(1.0, fd.lpNorm<Eigen::Infinity>());
    if (rel > 1e-5) return false;
  }
  // Two-unit MLP, biased away from ReLU kinks.
  {
    Eigen::MatrixXd X(10, 2);
    std::vector<int> y(10);
    for (int i = 0; i < 10; ++i) {
      X(i, 0) = rng.normal();
      X(i, 1) = rng.normal();
      y[i] = static_cast<int>(rng.index(2));
    }
    MlpParams p;
    p.w1 = Eigen::MatrixXd(2, 2);
    p.b1 = Eigen::VectorXd(2);
    p.w2 = Eigen::MatrixXd(2, 2);
    p.b2 = Eigen::VectorXd(2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        p.w1(i, j) = 0.2 * rng.normal();
        p.w2(i, j) = 0.2 * rng.normal();
      }
      p.b1(i) = 2.0 + 0.1 * rng.uniform();
      p.b2(i) = 0.1 * rng.normal();
    }
    MlpParams g = mlp_gradient(p, X, y);
    auto params_of = [&p]() {
      std::vector<double*> ptrs;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) ptrs.push_back(&p.w1(i, j));
      for (int i = 0; i < 2; ++i) ptrs.push_back(&p.b1(i));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) ptrs.push_back(&p.w2(i, j));
      for (int i = 0; i < 2; ++i) ptrs.push_back(&p.b2(i));
      return ptrs;
    };
    std::vector<double> grads;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) grads.push_back(g.w1(i, j));
    for (int i = 0; i < 2; ++i) grads.push_back(g.b1(i));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) grads.push_back(g.w2(i, j));
    for (int i = 0; i < 2; ++i) grads.push_back(g.b2(i));

    std::vector<double*> ptrs = params_of();
    double max_fd = 1.0, max_err = 0.0;
    std::vector<double> fds(ptrs.size());
    for (std::size_t k = 0; k < ptrs.size(); ++k) {
      const double orig = *ptrs[k];
      *ptrs[k] = orig + 1e-6;
      const double up = mlp_loss(p, X, y);
      *ptrs[k] = orig - 1e-6;
      const double dn = mlp_loss(p, X, y);
      *ptrs[k] = orig;
      fds[k] = (up - dn) / 2e-6;
      max_fd = std::max(max_fd, std::abs(fds[k]));
    }
    for (std::size_t k = 0; k < ptrs.size(); ++k) {
      max_err = std::max(max_err, std::abs(grads[k] - fds[k]));
    }
    if (max_err / max_fd > 1e-5) return false;
  }
  return true;
}

bool determinism(const std::filesystem::path& dir, const std::string& csv) {
  BenchmarkConfig cfg;
  DatasetSpec spec;
  spec.name = "adult_synth";
  spec.path = csv;
  spec.label_column = "income";
  spec.split.feature = "gender";
  spec.split.ood_values = {"female"};
  cfg.datasets = {spec};
  cfg.models = {"logistic"};
  cfg.seeds = {0, 1};
  cfg.tasks.n_bootstrap = 20;
  cfg.output_dir = (dir / "acc_det_out").string();

  BenchmarkReport r1 = run_benchmark(cfg);
  BenchmarkReport r2 = run_benchmark(cfg);
  const std::string j1 = (dir / "acc_det_1.json").string();
  const std::string j2 = (dir / "acc_det_2.json").string();
  const std::string m1 = (dir / "acc_det_1.md").string();
  const std::string m2 = (dir / "acc_det_2.md").string();
  emit_json(r1, j1);
  emit_json(r2, j2);
  emit_markdown(r1, m1);
  emit_markdown(r2, m2);
  return slurp(j1) == slurp(j2) && slurp(m1) == slurp(m2) &&
         !slurp(j1).empty();
}

bool directional_reproduction(const std::filesystem::path& dir,
                              const std::string& csv) {
  const auto t0 = std::chrono::steady_clock::now();
  BenchmarkConfig cfg;
  DatasetSpec spec;
  spec.name = "adult_synth";
  spec.path = csv;
  spec.label_column = "income";
  spec.split.feature = "gender";
  spec.split.ood_values = {"female"};
  cfg.datasets = {spec};
  cfg.models = {"logistic"};
  for (std::uint64_t s = 0; s < 10; ++s) cfg.seeds.push_back(s);
  cfg.output_dir = (dir / "acc_dir_out").string();

  BenchmarkReport report = run_benchmark(cfg);
  auto cell_mean = [&](const std::string& uq, const std::string& score,
                       const std::string& task) {
    for (const AggregateCell& c : report.cells) {
      if (c.uq_method == uq && c.score_name == score && c.task == task) {
        return c.mean;
      }
    }
    return std::nan("");
  };

  const double knn_ood = cell_mean("none", "baseline", "ood_detection");
  const double base_shift = cell_mean("none", "baseline", "shift_detection");
  const double base_ret = cell_mean("none", "baseline", "retention");
  const double ic_ret =
      cell_mean("isotonic_calibration", "max_confidence", "retention");

  bool ok = true;
  for (const char* score : {"p_value", "credibility", "confidence"}) {
    const double cp_ood =
        cell_mean("conformal_prediction", score, "ood_detection");
    const double cp_shift =
        cell_mean("conformal_prediction", score, "shift_detection");
    std::printf("  cp %s: ood %.3f shift %.3f\n", score, cp_ood, cp_shift);
    ok = ok && knn_ood > cp_ood && base_shift > cp_shift;
  }
  std::printf(
      "  baseline: ood %.3f shift %.3f retention %.3f | ic retention %.3f\n",
      knn_ood, base_shift, base_ret, ic_ret);
  ok = ok && std::abs(base_ret - ic_ret) <= 0.02;
  const double dt = seconds_since(t0);
  std::printf("  directional run: %.1fs\n", dt);
  return ok && dt < 600.0;
}

}  // namespace

int main() {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string csv = (dir / "acc_adult_synth.csv").string();
  write_csv(make_synthetic_adult(4000, 7), csv);

  TabularDataset raw = load_csv(csv, "income");
  OodSplit split = ood_split(raw, SplitSpec{"gender", {"female"}, true});

  std::vector<Cell> cells;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    cells.push_back(fit_cell(split.in_dist, split.ood, seed));
  }

  report(conformal_coverage(),
         "conformal coverage >= 0.88 at alpha 0.1 over 20 seeds");
  report(isotonic_oracle(),
         "isotonic PAVA matches exhaustive oracle (100 cases, 1e-9)");
  report(auroc_oracle(),
         "AUROC matches pair-counting oracle (200 tied cases)");
  report(decomposition_identities(),
         "ensemble decomposition identities over 1000 random ensembles");
  report(ks_null_behavior(cells),
         "KS null detection <= 0.12 per scorer; disjoint supports -> 1.0");
  report(atc_self_consistency(cells),
         "ATC self-consistency within 1/n_test for every cell and scorer");
  report(retention_endpoints(cells),
         "retention endpoints: F1(1) = 1 exactly, F1(0) = model F1");
  report(gradient_checks(),
         "logistic and 2-unit MLP gradients match finite differences");
  report(determinism(dir, csv),
         "benchmark rerun produces byte-identical reports");
  report(directional_reproduction(dir, csv),
         "directional ordering on the census-style gender split");

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
