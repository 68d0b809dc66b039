#include <cmath>

#include "doctest.h"
#include "mlmath/error.hpp"
#include "mlmath/metrics.hpp"
#include "mlmath/rng.hpp"

using namespace mlmath;

namespace {

// Classical binary MCC written out from the four cells.
double classical_mcc(double tn, double fp, double fn, double tp) {
  return (tp * tn - fp * fn) / std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
}

}  // namespace

TEST_CASE("confusion_matrix") {
  std::vector<Label> a{0, 1}, p{0, 1};
  CHECK(confusion_matrix(a, p, 2) == ConfusionMatrix(2, {1, 0, 0, 1}));
  std::vector<Label> a2{0, 0, 1}, p2{1, 0, 1};
  CHECK(confusion_matrix(a2, p2, 2) == ConfusionMatrix(2, {1, 1, 0, 1}));
  std::vector<Label> a3{2, 0, 1, 1};
  auto m = confusion_matrix(a3, a3, 3);
  CHECK(m(0, 0) == 1);
  CHECK(m(1, 1) == 2);
  CHECK(m.trace() == m.total());
  CHECK_THROWS_AS(confusion_matrix(a, a2, 2), InvalidArgument);
  std::vector<Label> bad{0, 3};
  CHECK_THROWS_AS(confusion_matrix(bad, a, 2), InvalidArgument);
}

TEST_CASE("precision and phi examples") {
  CHECK(naive_precision(ConfusionMatrix(2, {10, 0, 0, 10})) == 1.0);
  CHECK(naive_precision(ConfusionMatrix(2, {5, 5, 5, 5})) == 0.5);
  CHECK(naive_precision(ConfusionMatrix(2, {3, 1, 2, 4})) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(matthews_phi(ConfusionMatrix(2, {10, 0, 0, 10})) == doctest::Approx(1.0));
  CHECK(matthews_phi(ConfusionMatrix(2, {5, 5, 5, 5})) == doctest::Approx(0.0));
  CHECK(std::abs(matthews_phi(ConfusionMatrix(2, {8, 2, 3, 7})) - classical_mcc(8, 2, 3, 7)) < 1e-12);
  CHECK(matthews_phi(ConfusionMatrix(2, {0, 10, 10, 0})) == doctest::Approx(-1.0));
  CHECK(matthews_phi(ConfusionMatrix(3, {4, 0, 0, 0, 5, 0, 0, 0, 6})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(matthews_phi(ConfusionMatrix(2)), InvalidArgument);
  CHECK_THROWS_AS(naive_precision(ConfusionMatrix(2)), InvalidArgument);
}

TEST_CASE("binary phi equals classical MCC on random matrices") {
  Rng rng(RngSeed{2024});
  int checked = 0;
  while (checked < 1000) {
    std::vector<std::uint64_t> c(4);
    for (auto& v : c) v = rng.below(200);
    const double tn = c[0], fp = c[1], fn = c[2], tp = c[3];
    if (tp + fp == 0 || tp + fn == 0 || tn + fp == 0 || tn + fn == 0) continue;
    ConfusionMatrix m(2, c);
    CHECK(std::abs(matthews_phi(m) - classical_mcc(tn, fp, fn, tp)) < 1e-12);
    CHECK(naive_precision(m) == doctest::Approx((tn + tp) / (tn + fp + fn + tp)).epsilon(1e-15));
    ++checked;
  }
}

TEST_CASE("phi is invariant under simultaneous relabeling") {
  Rng rng(RngSeed{8});
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(3));
    std::vector<std::uint64_t> c(static_cast<std::size_t>(n * n));
    for (auto& v : c) v = 1 + rng.below(30);
    ConfusionMatrix m(n, c);
    auto perm = rng.permutation(static_cast<std::size_t>(n));
    std::vector<std::uint64_t> pc(c.size());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        pc[perm[static_cast<std::size_t>(i)] * static_cast<std::size_t>(n) + perm[static_cast<std::size_t>(j)]] =
            c[static_cast<std::size_t>(i * n + j)];
      }
    }
    CHECK(matthews_phi(ConfusionMatrix(n, pc)) == doctest::Approx(matthews_phi(m)).epsilon(1e-12));
  }
}

TEST_CASE("random predictor precision tends to 1/n") {
  Rng rng(RngSeed{99});
  const int n = 4;
  const std::size_t total = 40000;
  std::vector<Label> actual(total), predicted(total);
  for (std::size_t i = 0; i < total; ++i) {
    actual[i] = static_cast<Label>(i % n);
    predicted[i] = static_cast<Label>(rng.below(n));
  }
  const double p = naive_precision(confusion_matrix(actual, predicted, n));
  const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(total));
  CHECK(std::abs(p - 0.25) < 3 * sigma);
}

TEST_CASE("cross_val_aggregate") {
  std::vector<AccuracyPair> one{{1, 1}};
  auto s = cross_val_aggregate(one);
  CHECK(s.mean_precision == 1.0);
  CHECK(s.std_phi == 0.0);
  std::vector<AccuracyPair> two{{0.8, 0.6}, {0.6, 0.4}};
  s = cross_val_aggregate(two);
  CHECK(s.mean_precision == doctest::Approx(0.7));
  CHECK(s.mean_phi == doctest::Approx(0.5));
  CHECK(s.std_precision == doctest::Approx(0.1));
  std::vector<AccuracyPair> five(5, {0.9, 0.8});
  CHECK(cross_val_aggregate(five).std_precision == doctest::Approx(0.0));
  CHECK_THROWS_AS(cross_val_aggregate(std::vector<AccuracyPair>{}), InvalidArgument);
}
