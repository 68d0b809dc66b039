#include "mlmath/metrics.hpp"

#include <cmath>

#include "mlmath/error.hpp"

namespace mlmath {

ConfusionMatrix::ConfusionMatrix(int arity)
    : n_(arity), counts_(static_cast<std::size_t>(arity * arity), 0) {
  if (arity < 1) throw InvalidArgument("confusion matrix arity must be positive");
}

ConfusionMatrix::ConfusionMatrix(int arity, std::vector<std::uint64_t> counts)
    : n_(arity), counts_(std::move(counts)) {
  if (arity < 1 || counts_.size() != static_cast<std::size_t>(arity * arity)) {
    throw InvalidArgument("confusion matrix needs arity^2 counts");
  }
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(int i) const {
  std::uint64_t t = 0;
  for (int j = 0; j < n_; ++j) t += (*this)(i, j);
  return t;
}

std::uint64_t ConfusionMatrix::col_sum(int j) const {
  std::uint64_t t = 0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, j);
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const Label> actual, std::span<const Label> predicted,
                                 int arity) {
  if (actual.size() != predicted.size()) {
    throw InvalidArgument("actual and predicted lists differ in length");
  }
  if (actual.empty()) throw InvalidArgument("confusion matrix needs at least one example");
  ConfusionMatrix m(arity);
  for (std::size_t k = 0; k < actual.size(); ++k) {
    const Label a = actual[k];
    const Label p = predicted[k];
    if (a < 0 || a >= arity || p < 0 || p >= arity) {
      throw InvalidArgument("label out of range at position " + std::to_string(k));
    }
    m.increment(a, p);
  }
  return m;
}

double naive_precision(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw InvalidArgument("precision of an empty confusion matrix");
  return static_cast<double>(m.trace()) / static_cast<double>(total);
}

double chi_squared(const ConfusionMatrix& m) {
  const double total = static_cast<double>(m.total());
  if (total == 0) throw InvalidArgument("chi-squared of an all-zero matrix");
  const int n = m.arity();
  std::vector<double> rows(static_cast<std::size_t>(n)), cols(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rows[static_cast<std::size_t>(i)] = static_cast<double>(m.row_sum(i));
    cols[static_cast<std::size_t>(i)] = static_cast<double>(m.col_sum(i));
  }
  double chi2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double expected = rows[static_cast<std::size_t>(i)] * cols[static_cast<std::size_t>(j)] / total;
      if (expected <= 0.0) continue;
      const double diff = static_cast<double>(m(i, j)) - expected;
      chi2 += diff * diff / expected;
    }
  }
  return chi2;
}

double matthews_phi(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw InvalidArgument("phi of an all-zero matrix");
  const int n = m.arity();
  if (n < 2) return 0.0;
  const double chi2 = chi_squared(m);
  double phi = std::sqrt(chi2 / (static_cast<double>(total) * (n - 1)));
  if (n == 2) {
    const double det = static_cast<double>(m(0, 0)) * static_cast<double>(m(1, 1)) -
                       static_cast<double>(m(0, 1)) * static_cast<double>(m(1, 0));
    if (det < 0) phi = -phi;
  }
  return phi;
}

AccuracyPair accuracy(const ConfusionMatrix& m) {
  return {naive_precision(m), matthews_phi(m)};
}

CvSummary cross_val_aggregate(std::span<const AccuracyPair> pairs) {
  if (pairs.empty()) throw InvalidArgument("cannot aggregate zero folds");
  CvSummary s;
  s.per_fold.assign(pairs.begin(), pairs.end());
  const double k = static_cast<double>(pairs.size());
  for (const auto& p : pairs) {
    s.mean_precision += p.precision;
    s.mean_phi += p.phi;
  }
  s.mean_precision /= k;
  s.mean_phi /= k;
  for (const auto& p : pairs) {
    s.std_precision += (p.precision - s.mean_precision) * (p.precision - s.mean_precision);
    s.std_phi += (p.phi - s.mean_phi) * (p.phi - s.mean_phi);
  }
  s.std_precision = std::sqrt(s.std_precision / k);
  s.std_phi = std::sqrt(s.std_phi / k);
  return s;
}

}  // namespace mlmath
