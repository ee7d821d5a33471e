#pragma once

#include <optional>
#include <vector>

namespace uqbench {

// AUROC of `scores` against binary `labels` (1 = target event), computed
// exactly as the Mann-Whitney statistic; tied score pairs get half credit.
// Returns nullopt when only one class is present.
std::optional<double> auroc(const std::vector<double>& scores,
                            const std::vector<int>& labels);

// 2TP / (2TP + FP + FN); 1.0 when TP = FP = FN = 0, 0.0 when TP = 0 with
// FP + FN > 0. The degenerate convention makes retention at r = 1 exactly 1.
double f1_score(const std::vector<int>& predictions,
                const std::vector<int>& labels);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test. D is exact; the p-value uses the
// asymptotic Kolmogorov distribution at the effective sample size
// n_a * n_b / (n_a + n_b).
KsResult ks_two_sample(const std::vector<double>& a,
                       const std::vector<double>& b);

// Survival function of the Kolmogorov distribution, Q(lambda) =
// 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// Trapezoidal area under (xs, ys); xs must be strictly increasing.
double trapezoid_area(const std::vector<double>& xs,
                      const std::vector<double>& ys);

}  // namespace uqbench
