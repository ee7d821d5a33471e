#include "uqbench/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uqbench/metrics.hpp"
#include "uqbench/rng.hpp"

namespace uqbench {
namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

RetentionCurve retention(const TaskInput& input, int grid_size) {
  require(input.X_test.rows() > 0, "retention: empty test set");
  require(grid_size >= 2, "retention: grid_size must be >= 2");
  const std::size_t n = input.y_test.size();

  const std::vector<int> preds = predict_labels(*input.model, input.X_test);
  const std::vector<double> u = to_std(input.scorer->score(input.X_test));

  // Most uncertain first; ties broken by stable sample index.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return u[a] > u[b]; });

  // Running confusion counts, updated as the oracle takes over one sample
  // at a time in uncertainty order.
  std::size_t tp = 0, fp = 0, fn = 0;
  const std::vector<int>& y = input.y_test;
  for (std::size_t i = 0; i < n; ++i) {
    if (preds[i] == 1 && y[i] == 1) ++tp;
    if (preds[i] == 1 && y[i] == 0) ++fp;
    if (preds[i] == 0 && y[i] == 1) ++fn;
  }
  auto f1_from_counts = [](std::size_t tp_, std::size_t fp_, std::size_t fn_) {
    if (tp_ == 0) return (fp_ + fn_ == 0) ? 1.0 : 0.0;
    return 2.0 * static_cast<double>(tp_) /
           static_cast<double>(2 * tp_ + fp_ + fn_);
  };

  RetentionCurve curve;
  std::size_t replaced = 0;
  for (int g = 0; g < grid_size; ++g) {
    const double r = static_cast<double>(g) / static_cast<double>(grid_size - 1);
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(r * static_cast<double>(n) - 1e-9));
    while (replaced < k) {
      const std::size_t idx = order[replaced++];
      // Oracle replaces this sample's prediction with the truth.
      if (preds[idx] == 1 && y[idx] == 0) {
        --fp;  // false positive becomes a true negative
      } else if (preds[idx] == 0 && y[idx] == 1) {
        --fn;  // false negative becomes a true positive
        ++tp;
      }
    }
    curve.budgets.push_back(r);
    curve.f1_values.push_back(f1_from_counts(tp, fp, fn));
  }
  curve.area = trapezoid_area(curve.budgets, curve.f1_values);
  return curve;
}

std::optional<double> error_detection(const TaskInput& input) {
  const std::vector<int> preds = predict_labels(*input.model, input.X_test);
  std::vector<int> errors(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    errors[i] = (preds[i] != input.y_test[i]) ? 1 : 0;
  }
  return auroc(to_std(input.scorer->score(input.X_test)), errors);
}

std::optional<double> ood_detection(const TaskInput& input) {
  require(input.X_test.rows() > 0 && input.X_shifted.rows() > 0,
          "ood_detection: empty partition");
  std::vector<double> scores = to_std(input.scorer->score(input.X_test));
  std::vector<int> events(scores.size(), 0);
  const std::vector<double> shifted =
      to_std(input.scorer->score(input.X_shifted));
  scores.insert(scores.end(), shifted.begin(), shifted.end());
  events.insert(events.end(), shifted.size(), 1);
  return auroc(scores, events);
}

double shift_detection(const TaskInput& input, int n_bootstrap, double alpha) {
  require(input.X_test.rows() > 0 && input.X_shifted.rows() > 0,
          "shift_detection: empty partition");
  const std::vector<double> u_test = to_std(input.scorer->score(input.X_test));
  const std::vector<double> u_shift =
      to_std(input.scorer->score(input.X_shifted));

  // Scorers are pointwise, so a bootstrap of the shifted rows is a
  // bootstrap of their scores.
  const std::size_t n = u_shift.size();
  int detected = 0;
  for (int b = 0; b < n_bootstrap; ++b) {
    Rng rng(Rng::derive(input.rng_seed, static_cast<std::uint64_t>(b)));
    std::vector<double> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = u_shift[rng.index(n)];
    if (ks_two_sample(u_test, sample).p_value < alpha) ++detected;
  }
  return static_cast<double>(detected) / static_cast<double>(n_bootstrap);
}

AtcState atc_fit(const std::vector<double>& test_uncertainty,
                 const std::vector<int>& predictions,
                 const std::vector<int>& labels) {
  require(!test_uncertainty.empty(), "atc_fit: empty test set");
  require(test_uncertainty.size() == predictions.size() &&
              predictions.size() == labels.size(),
          "atc_fit: length mismatch");
  const std::size_t n = test_uncertainty.size();

  std::size_t n_err = 0;
  for (std::size_t i = 0; i < n; ++i) n_err += (predictions[i] != labels[i]);
  const double err = static_cast<double>(n_err) / static_cast<double>(n);

  std::vector<double> sorted(test_uncertainty);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::floor(static_cast<double>(n - 1) * (1.0 - err)));
  const double t = sorted[idx];

  double frac_above = 0.0, frac_eq = 0.0;
  for (double v : test_uncertainty) {
    if (v > t) frac_above += 1.0;
    if (v == t) frac_eq += 1.0;
  }
  frac_above /= static_cast<double>(n);
  frac_eq /= static_cast<double>(n);

  AtcState state;
  state.threshold = t;
  state.test_error_rate = err;
  state.tie_fraction =
      frac_eq > 0.0 ? std::clamp((err - frac_above) / frac_eq, 0.0, 1.0) : 0.0;
  state.low_information = (sorted.front() == sorted.back());
  return state;
}

double atc_estimate(const AtcState& state,
                    const std::vector<double>& uncertainty) {
  require(!uncertainty.empty(), "atc_estimate: empty input");
  double above = 0.0, eq = 0.0;
  for (double v : uncertainty) {
    if (v > state.threshold) above += 1.0;
    if (v == state.threshold) eq += 1.0;
  }
  const double n = static_cast<double>(uncertainty.size());
  return (above + state.tie_fraction * eq) / n;
}

double perf_drop_prediction(const TaskInput& input, int n_bootstrap) {
  require(input.X_shifted.rows() > 0, "perf_drop_prediction: empty shifted set");
  const std::vector<int> preds_test =
      predict_labels(*input.model, input.X_test);
  const AtcState state = atc_fit(to_std(input.scorer->score(input.X_test)),
                                 preds_test, input.y_test);

  const std::vector<double> u_shift =
      to_std(input.scorer->score(input.X_shifted));
  const std::vector<int> preds_shift =
      predict_labels(*input.model, input.X_shifted);
  std::vector<int> err_shift(preds_shift.size());
  for (std::size_t i = 0; i < preds_shift.size(); ++i) {
    err_shift[i] = (preds_shift[i] != input.y_shifted[i]) ? 1 : 0;
  }
  const std::size_t n = u_shift.size();

  auto eval = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> u(idx.size());
    double true_err = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      u[i] = u_shift[idx[i]];
      true_err += err_shift[idx[i]];
    }
    true_err /= static_cast<double>(idx.size());
    return std::abs(atc_estimate(state, u) - true_err);
  };

  if (n_bootstrap <= 0) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    return eval(all);
  }
  double mae = 0.0;
  for (int b = 0; b < n_bootstrap; ++b) {
    Rng rng(Rng::derive(input.rng_seed, static_cast<std::uint64_t>(b)));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = rng.index(n);
    mae += eval(idx);
  }
  return mae / static_cast<double>(n_bootstrap);
}

}  // namespace uqbench
