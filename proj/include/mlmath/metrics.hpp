#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlmath/dataset.hpp"

namespace mlmath {

/// counts(i, j) = number of validation examples with actual label i that were
/// predicted as j.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int arity);
  ConfusionMatrix(int arity, std::vector<std::uint64_t> counts);

  int arity() const { return n_; }
  std::uint64_t operator()(int actual, int predicted) const {
    return counts_[static_cast<std::size_t>(actual * n_ + predicted)];
  }
  void increment(int actual, int predicted) {
    ++counts_[static_cast<std::size_t>(actual * n_ + predicted)];
  }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(int i) const;
  std::uint64_t col_sum(int j) const;
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int n_;
  std::vector<std::uint64_t> counts_;
};

/// (naive precision, Matthews correlation).
struct AccuracyPair {
  double precision = 0.0;
  double phi = 0.0;
};

struct CvSummary {
  std::vector<AccuracyPair> per_fold;
  double mean_precision = 0.0;
  double std_precision = 0.0;
  double mean_phi = 0.0;
  double std_phi = 0.0;
};

ConfusionMatrix confusion_matrix(std::span<const Label> actual, std::span<const Label> predicted,
                                 int arity);

/// trace(M) / total(M).
double naive_precision(const ConfusionMatrix& m);

/// Pearson chi-squared of M against the independence model built from its
/// marginals; cells with zero expected count are skipped.
double chi_squared(const ConfusionMatrix& m);

/// Matthews-style correlation phi = sqrt(chi^2 / (N (n - 1))) (Cramer's V),
/// which reaches 1 on a perfect n-ary classifier. For n = 2 the value carries
/// the sign of TP*TN - FP*FN and so coincides with the binary MCC.
double matthews_phi(const ConfusionMatrix& m);

AccuracyPair accuracy(const ConfusionMatrix& m);

/// Sample means and population standard deviations of each component.
CvSummary cross_val_aggregate(std::span<const AccuracyPair> pairs);

}  // namespace mlmath
