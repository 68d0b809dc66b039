#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mlmath/dataset.hpp"
#include "mlmath/rng.hpp"

namespace mlmath {

enum class LearnerKind { mlp, svm, naive_bayes, logistic, decision_tree, random_forest, knn };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& text);

enum class Activation { sigmoid, relu };
std::string to_string(Activation a);
Activation activation_from_string(const std::string& text);

struct MlpParams {
  std::vector<std::size_t> layers{64, 32};
  Activation activation = Activation::relu;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::size_t epochs = 50;
};

enum class SvmKernel { linear, rbf };
std::string to_string(SvmKernel k);
SvmKernel svm_kernel_from_string(const std::string& text);

struct SvmParams {
  SvmKernel kernel = SvmKernel::rbf;
  double c = 1.0;
  double gamma = 0.0;  // 0 selects 1/d at fit time
  double tolerance = 1e-3;
  std::size_t max_iterations = 0;  // 0 selects max(10^6, 100 n)
  std::size_t cache_mb = 512;
};

struct NaiveBayesParams {
  double alpha = 1.0;
  std::size_t max_categories = 8;
};

struct LogisticParams {
  double learning_rate = 0.05;
  double l2 = 1e-4;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
};

struct TreeParams {
  std::size_t max_depth = 20;
  std::size_t min_leaf = 1;
};

struct ForestParams {
  std::size_t trees = 100;
  std::size_t max_depth = 20;
  std::size_t min_leaf = 1;
  std::size_t max_features = 0;  // 0 selects round(sqrt(d))
};

enum class KnnMetric { automatic, hamming, euclidean };
std::string to_string(KnnMetric m);
KnnMetric knn_metric_from_string(const std::string& text);

struct KnnParams {
  std::size_t k = 0;  // 0 selects 50 for Hamming, 5 for Euclidean
  KnnMetric metric = KnnMetric::automatic;
};

using LearnerParams = std::variant<MlpParams, SvmParams, NaiveBayesParams, LogisticParams,
                                   TreeParams, ForestParams, KnnParams>;

struct LearnerSpec {
  LearnerParams params;
  RngSeed seed{0};

  LearnerKind kind() const;
  static LearnerSpec defaults(LearnerKind kind, RngSeed seed = RngSeed{0});

  /// Throws InvalidArgument describing the first bad hyperparameter.
  void validate() const;
};

nlohmann::ordered_json to_json(const LearnerSpec& spec);
LearnerSpec learner_spec_from_json(const nlohmann::ordered_json& j);

/// Per-feature affine map fitted on training data.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 / stddev, or 1 for constant features

  bool active() const { return !mean.empty(); }
  static Standardizer fit(const LabeledDataset& ds);
  void apply(std::span<const double> in, std::span<double> out) const;
};

namespace detail {
class ModelImpl;
}

/// A fitted classifier. Immutable; predict may be called concurrently.
class TrainedModel {
 public:
  TrainedModel(LearnerSpec spec, int arity, std::size_t dim, Standardizer standardizer,
               std::shared_ptr<const detail::ModelImpl> impl);

  const LearnerSpec& spec() const { return spec_; }
  int label_arity() const { return arity_; }
  std::size_t feature_dim() const { return dim_; }

  Label predict(std::span<const double> features) const;
  std::vector<Label> predict_batch(const LabeledDataset& ds) const;
  /// Rows of length feature_dim() laid out contiguously.
  std::vector<Label> predict_batch(std::span<const double> rows) const;

  /// SVM decision values (one per one-vs-rest machine; a single value for
  /// two classes, positive meaning label 1). Throws for other learners.
  std::vector<double> decision_values(std::span<const double> features) const;

  nlohmann::ordered_json to_json() const;
  static TrainedModel from_json(const nlohmann::ordered_json& j);
  void save(const std::filesystem::path& path) const;
  static TrainedModel load(const std::filesystem::path& path);

 private:
  LearnerSpec spec_;
  int arity_;
  std::size_t dim_;
  Standardizer standardizer_;
  std::shared_ptr<const detail::ModelImpl> impl_;
};

TrainedModel fit(const LearnerSpec& spec, const LabeledDataset& train);

inline Label predict(const TrainedModel& m, std::span<const double> x) { return m.predict(x); }
inline std::vector<Label> predict_batch(const TrainedModel& m, const LabeledDataset& ds) {
  return m.predict_batch(ds);
}

/// Version tag written into saved models.
inline constexpr int kModelFormatVersion = 1;

}  // namespace mlmath
