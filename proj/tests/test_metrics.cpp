#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uqbench/metrics.hpp"
#include "uqbench/rng.hpp"

using namespace uqbench;

TEST_CASE("auroc basics") {
  CHECK(*auroc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
  CHECK(*auroc({0.3, 0.3, 0.3, 0.3}, {1, 0, 1, 0}) == doctest::Approx(0.5));
  // 2 of 4 pairs concordant
  CHECK(*auroc({0.8, 0.4, 0.6, 0.2}, {1, 0, 0, 1}) == doctest::Approx(0.5));
  CHECK(!auroc({0.1, 0.2}, {1, 1}).has_value());
}

TEST_CASE("auroc matches pair-counting oracle on random tied instances") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.index(49);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.index(6)) / 5.0;  // heavy ties
      labels[i] = static_cast<int>(rng.index(2));
    }
    auto got = auroc(scores, labels);
    bool has0 = false, has1 = false;
    for (int y : labels) (y ? has1 : has0) = true;
    if (!has0 || !has1) {
      CHECK(!got.has_value());
      continue;
    }
    CHECK(*got == doctest::Approx(oracles::pair_counting_auroc(scores, labels))
                      .epsilon(1e-12));
  }
}

TEST_CASE("auroc complement and monotone-transform invariance") {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 4 + rng.index(40);
    std::vector<double> scores(n), neg(n), warped(n);
    std::vector<int> labels(n);
    labels[0] = 0;
    labels[1] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = rng.uniform();
      if (i > 1) labels[i] = static_cast<int>(rng.index(2));
      neg[i] = -scores[i];
      warped[i] = std::exp(3.0 * scores[i]);  // strictly increasing
    }
    CHECK(*auroc(scores, labels) + *auroc(neg, labels) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*auroc(scores, labels) == *auroc(warped, labels));
  }
}

TEST_CASE("f1 conventions") {
  CHECK(f1_score({1, 0, 1}, {1, 0, 1}) == doctest::Approx(1.0));
  CHECK(f1_score({1, 1, 0}, {1, 0, 1}) == doctest::Approx(0.5));  // TP=FP=FN=1
  CHECK(f1_score({0, 0}, {0, 0}) == doctest::Approx(1.0));  // no positives
  CHECK(f1_score({1, 0}, {0, 1}) == doctest::Approx(0.0));  // TP=0
}

TEST_CASE("ks two-sample") {
  KsResult same = ks_two_sample({1, 2, 3}, {1, 2, 3});
  CHECK(same.statistic == doctest::Approx(0.0));
  CHECK(same.p_value == doctest::Approx(1.0));

  CHECK(ks_two_sample({0, 0}, {1, 1}).statistic == doctest::Approx(1.0));
  CHECK(ks_two_sample({1, 2, 3, 4}, {3, 4, 5, 6}).statistic ==
        doctest::Approx(0.5));
}

TEST_CASE("ks statistic matches ECDF enumeration oracle and is symmetric") {
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(3 + rng.index(30)), b(3 + rng.index(30));
    for (double& v : a) v = static_cast<double>(rng.index(10));
    for (double& v : b) v = static_cast<double>(rng.index(10));
    const double d = ks_two_sample(a, b).statistic;
    CHECK(d == doctest::Approx(oracles::ecdf_ks(a, b)).epsilon(1e-12));
    CHECK(d == doctest::Approx(ks_two_sample(b, a).statistic));
  }
}

TEST_CASE("trapezoid area") {
  CHECK(trapezoid_area({0, 1}, {1, 1}) == doctest::Approx(1.0));
  CHECK(trapezoid_area({0, 0.25, 0.9, 1}, {0, 0.25, 0.9, 1}) ==
        doctest::Approx(0.5));  // exact for linear y = x
  CHECK(trapezoid_area({0, 0.5, 1}, {0, 1, 0}) == doctest::Approx(0.5));
  CHECK_THROWS(trapezoid_area({0, 0.5, 0.5}, {0, 1, 0}));
}

TEST_CASE("trapezoid is linear in ys") {
  const std::vector<double> xs = {0, 0.2, 0.7, 1.0};
  const std::vector<double> y1 = {0.1, 0.4, 0.3, 0.9};
  const std::vector<double> y2 = {1.0, 0.0, 0.5, 0.2};
  std::vector<double> combo(4);
  for (int i = 0; i < 4; ++i) combo[i] = 2.0 * y1[i] + 3.0 * y2[i];
  CHECK(trapezoid_area(xs, combo) ==
        doctest::Approx(2.0 * trapezoid_area(xs, y1) +
                        3.0 * trapezoid_area(xs, y2)));
}
