#pragma once

// Private interface between TrainedModel and the individual learners.

#include <memory>
#include <span>
#include <vector>

#include "json.hpp"
#include "mlmath/dataset.hpp"
#include "mlmath/learners.hpp"

namespace mlmath::detail {

class ModelImpl {
 public:
  virtual ~ModelImpl() = default;
  /// `x` is already standardized when the model uses standardization.
  virtual Label predict(std::span<const double> x) const = 0;
  /// Predicts contiguous rows; the default parallelizes predict over rows.
  virtual std::vector<Label> predict_rows(std::span<const double> rows, std::size_t dim) const;
  virtual nlohmann::ordered_json to_json() const = 0;
  /// Raw per-machine scores; only SVMs define them.
  virtual std::vector<double> decision_values(std::span<const double> x) const;
};

using ImplPtr = std::shared_ptr<const ModelImpl>;

// Each learner receives the (possibly standardized) training set.
ImplPtr fit_mlp(const MlpParams& p, RngSeed seed, const LabeledDataset& train);
ImplPtr fit_svm(const SvmParams& p, RngSeed seed, const LabeledDataset& train);
ImplPtr fit_naive_bayes(const NaiveBayesParams& p, const LabeledDataset& train);
ImplPtr fit_logistic(const LogisticParams& p, RngSeed seed, const LabeledDataset& train);
ImplPtr fit_tree(const TreeParams& p, RngSeed seed, const LabeledDataset& train);
ImplPtr fit_forest(const ForestParams& p, RngSeed seed, const LabeledDataset& train);
ImplPtr fit_knn(const KnnParams& p, const LabeledDataset& train);

ImplPtr load_mlp(const nlohmann::ordered_json& j);
ImplPtr load_svm(const nlohmann::ordered_json& j);
ImplPtr load_naive_bayes(const nlohmann::ordered_json& j);
ImplPtr load_logistic(const nlohmann::ordered_json& j);
ImplPtr load_tree(const nlohmann::ordered_json& j);
ImplPtr load_forest(const nlohmann::ordered_json& j);
ImplPtr load_knn(const nlohmann::ordered_json& j);

/// Index of the largest score; ties go to the lowest index.
inline Label argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<Label>(best);
}

}  // namespace mlmath::detail
