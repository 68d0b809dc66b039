#include "mlmath/learners.hpp"

#include <cmath>

#include "mlmath/error.hpp"
#include "mlmath/io.hpp"
#include "model_impl.hpp"

namespace mlmath {

using nlohmann::ordered_json;

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& text, const std::pair<E, const char*> (&table)[N], const char* what) {
  for (const auto& [value, name] : table) {
    if (text == name) return value;
  }
  throw InvalidArgument(std::string("unknown ") + what + " '" + text + "'");
}

template <typename E, std::size_t N>
std::string enum_name(E value, const std::pair<E, const char*> (&table)[N]) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::pair<LearnerKind, const char*> kKinds[] = {
    {LearnerKind::mlp, "mlp"},
    {LearnerKind::svm, "svm"},
    {LearnerKind::naive_bayes, "naive_bayes"},
    {LearnerKind::logistic, "logistic"},
    {LearnerKind::decision_tree, "decision_tree"},
    {LearnerKind::random_forest, "random_forest"},
    {LearnerKind::knn, "knn"},
};
constexpr std::pair<Activation, const char*> kActivations[] = {
    {Activation::sigmoid, "sigmoid"}, {Activation::relu, "relu"}};
constexpr std::pair<SvmKernel, const char*> kSvmKernels[] = {
    {SvmKernel::linear, "linear"}, {SvmKernel::rbf, "rbf"}};
constexpr std::pair<KnnMetric, const char*> kKnnMetrics[] = {
    {KnnMetric::automatic, "auto"}, {KnnMetric::hamming, "hamming"}, {KnnMetric::euclidean, "euclidean"}};

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

bool uses_standardization(LearnerKind kind) {
  return kind == LearnerKind::mlp || kind == LearnerKind::svm || kind == LearnerKind::logistic ||
         kind == LearnerKind::knn;
}

}  // namespace

std::string to_string(LearnerKind kind) { return enum_name(kind, kKinds); }
LearnerKind learner_kind_from_string(const std::string& text) {
  return parse_enum(text, kKinds, "learner kind");
}
std::string to_string(Activation a) { return enum_name(a, kActivations); }
Activation activation_from_string(const std::string& text) {
  return parse_enum(text, kActivations, "activation");
}
std::string to_string(SvmKernel k) { return enum_name(k, kSvmKernels); }
SvmKernel svm_kernel_from_string(const std::string& text) {
  return parse_enum(text, kSvmKernels, "svm kernel");
}
std::string to_string(KnnMetric m) { return enum_name(m, kKnnMetrics); }
KnnMetric knn_metric_from_string(const std::string& text) {
  return parse_enum(text, kKnnMetrics, "knn metric");
}

LearnerKind LearnerSpec::kind() const { return static_cast<LearnerKind>(params.index()); }

LearnerSpec LearnerSpec::defaults(LearnerKind kind, RngSeed seed) {
  LearnerSpec s;
  s.seed = seed;
  switch (kind) {
    case LearnerKind::mlp: s.params = MlpParams{}; break;
    case LearnerKind::svm: s.params = SvmParams{}; break;
    case LearnerKind::naive_bayes: s.params = NaiveBayesParams{}; break;
    case LearnerKind::logistic: s.params = LogisticParams{}; break;
    case LearnerKind::decision_tree: s.params = TreeParams{}; break;
    case LearnerKind::random_forest: s.params = ForestParams{}; break;
    case LearnerKind::knn: s.params = KnnParams{}; break;
  }
  return s;
}

void LearnerSpec::validate() const {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) {
          require(!p.layers.empty(), "mlp.layers must be non-empty");
          for (auto w : p.layers) require(w >= 1, "mlp.layers widths must be >= 1");
          require(p.learning_rate > 0, "mlp.learning_rate must be > 0");
          require(p.batch_size >= 1, "mlp.batch_size must be >= 1");
          require(p.epochs >= 1, "mlp.epochs must be >= 1");
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          require(p.c > 0, "svm.c must be > 0");
          require(p.gamma >= 0, "svm.gamma must be > 0 (or 0 for 1/d)");
          require(p.tolerance > 0, "svm.tolerance must be > 0");
          require(p.cache_mb >= 1, "svm.cache_mb must be >= 1");
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          require(p.alpha > 0, "naive_bayes.alpha must be > 0");
          require(p.max_categories >= 1, "naive_bayes.max_categories must be >= 1");
        } else if constexpr (std::is_same_v<T, LogisticParams>) {
          require(p.learning_rate > 0, "logistic.learning_rate must be > 0");
          require(p.l2 >= 0, "logistic.l2 must be >= 0");
          require(p.epochs >= 1, "logistic.epochs must be >= 1");
          require(p.batch_size >= 1, "logistic.batch_size must be >= 1");
        } else if constexpr (std::is_same_v<T, TreeParams>) {
          require(p.max_depth >= 1, "decision_tree.max_depth must be >= 1");
          require(p.min_leaf >= 1, "decision_tree.min_leaf must be >= 1");
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          require(p.trees >= 1, "random_forest.trees must be >= 1");
          require(p.max_depth >= 1, "random_forest.max_depth must be >= 1");
          require(p.min_leaf >= 1, "random_forest.min_leaf must be >= 1");
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          // k = 0 means "default for the metric"; any explicit k >= 1 is valid.
        }
      },
      params);
}

ordered_json to_json(const LearnerSpec& spec) {
  ordered_json j;
  j["kind"] = to_string(spec.kind());
  j["seed"] = spec.seed.value;
  ordered_json h;
  std::visit(
      [&h](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) {
          h["layers"] = p.layers;
          h["activation"] = to_string(p.activation);
          h["learning_rate"] = p.learning_rate;
          h["batch_size"] = p.batch_size;
          h["epochs"] = p.epochs;
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          h["kernel"] = to_string(p.kernel);
          h["c"] = p.c;
          h["gamma"] = p.gamma;
          h["tolerance"] = p.tolerance;
          h["max_iterations"] = p.max_iterations;
          h["cache_mb"] = p.cache_mb;
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          h["alpha"] = p.alpha;
          h["max_categories"] = p.max_categories;
        } else if constexpr (std::is_same_v<T, LogisticParams>) {
          h["learning_rate"] = p.learning_rate;
          h["l2"] = p.l2;
          h["epochs"] = p.epochs;
          h["batch_size"] = p.batch_size;
        } else if constexpr (std::is_same_v<T, TreeParams>) {
          h["max_depth"] = p.max_depth;
          h["min_leaf"] = p.min_leaf;
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          h["trees"] = p.trees;
          h["max_depth"] = p.max_depth;
          h["min_leaf"] = p.min_leaf;
          h["max_features"] = p.max_features;
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          h["k"] = p.k;
          h["metric"] = to_string(p.metric);
        }
      },
      spec.params);
  j["hyperparameters"] = h;
  return j;
}

LearnerSpec learner_spec_from_json(const ordered_json& j) {
  LearnerSpec s = LearnerSpec::defaults(learner_kind_from_string(j.at("kind").get<std::string>()),
                                        RngSeed{j.at("seed").get<std::uint64_t>()});
  const auto& h = j.at("hyperparameters");
  std::visit(
      [&h](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) {
          p.layers = h.at("layers").get<std::vector<std::size_t>>();
          p.activation = activation_from_string(h.at("activation").get<std::string>());
          p.learning_rate = h.at("learning_rate").get<double>();
          p.batch_size = h.at("batch_size").get<std::size_t>();
          p.epochs = h.at("epochs").get<std::size_t>();
        } else if constexpr (std::is_same_v<T, SvmParams>) {
          p.kernel = svm_kernel_from_string(h.at("kernel").get<std::string>());
          p.c = h.at("c").get<double>();
          p.gamma = h.at("gamma").get<double>();
          p.tolerance = h.at("tolerance").get<double>();
          p.max_iterations = h.at("max_iterations").get<std::size_t>();
          p.cache_mb = h.at("cache_mb").get<std::size_t>();
        } else if constexpr (std::is_same_v<T, NaiveBayesParams>) {
          p.alpha = h.at("alpha").get<double>();
          p.max_categories = h.at("max_categories").get<std::size_t>();
        } else if constexpr (std::is_same_v<T, LogisticParams>) {
          p.learning_rate = h.at("learning_rate").get<double>();
          p.l2 = h.at("l2").get<double>();
          p.epochs = h.at("epochs").get<std::size_t>();
          p.batch_size = h.at("batch_size").get<std::size_t>();
        } else if constexpr (std::is_same_v<T, TreeParams>) {
          p.max_depth = h.at("max_depth").get<std::size_t>();
          p.min_leaf = h.at("min_leaf").get<std::size_t>();
        } else if constexpr (std::is_same_v<T, ForestParams>) {
          p.trees = h.at("trees").get<std::size_t>();
          p.max_depth = h.at("max_depth").get<std::size_t>();
          p.min_leaf = h.at("min_leaf").get<std::size_t>();
          p.max_features = h.at("max_features").get<std::size_t>();
        } else if constexpr (std::is_same_v<T, KnnParams>) {
          p.k = h.at("k").get<std::size_t>();
          p.metric = knn_metric_from_string(h.at("metric").get<std::string>());
        }
      },
      s.params);
  s.validate();
  return s;
}

Standardizer Standardizer::fit(const LabeledDataset& ds) {
  const std::size_t d = ds.dimension();
  const double n = static_cast<double>(ds.size());
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto x = ds.features(i);
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += x[j];
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto x = ds.features(i);
    for (std::size_t j = 0; j < d; ++j) var[j] += (x[j] - s.mean[j]) * (x[j] - s.mean[j]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / n);
    s.scale[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) * scale[j];
}

namespace detail {

std::vector<Label> ModelImpl::predict_rows(std::span<const double> rows, std::size_t dim) const {
  const std::size_t n = dim == 0 ? 0 : rows.size() / dim;
  std::vector<Label> out(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto r = static_cast<std::size_t>(i);
    out[r] = predict(rows.subspan(r * dim, dim));
  }
  return out;
}

}  // namespace detail

TrainedModel::TrainedModel(LearnerSpec spec, int arity, std::size_t dim, Standardizer standardizer,
                           std::shared_ptr<const detail::ModelImpl> impl)
    : spec_(std::move(spec)),
      arity_(arity),
      dim_(dim),
      standardizer_(std::move(standardizer)),
      impl_(std::move(impl)) {}

Label TrainedModel::predict(std::span<const double> features) const {
  if (features.size() != dim_) {
    throw InvalidArgument("feature vector has length " + std::to_string(features.size()) +
                          ", model expects " + std::to_string(dim_));
  }
  if (!standardizer_.active()) return impl_->predict(features);
  std::vector<double> x(dim_);
  standardizer_.apply(features, x);
  return impl_->predict(x);
}

std::vector<double> TrainedModel::decision_values(std::span<const double> features) const {
  if (features.size() != dim_) throw InvalidArgument("feature vector has the wrong length");
  if (!standardizer_.active()) return impl_->decision_values(features);
  std::vector<double> x(dim_);
  standardizer_.apply(features, x);
  return impl_->decision_values(x);
}

std::vector<Label> TrainedModel::predict_batch(std::span<const double> rows) const {
  if (rows.empty()) return {};
  if (rows.size() % dim_ != 0) throw InvalidArgument("batch is not a whole number of rows");
  if (!standardizer_.active()) return impl_->predict_rows(rows, dim_);
  std::vector<double> scaled(rows.size());
  for (std::size_t r = 0; r < rows.size() / dim_; ++r) {
    standardizer_.apply(rows.subspan(r * dim_, dim_), std::span<double>(scaled).subspan(r * dim_, dim_));
  }
  return impl_->predict_rows(scaled, dim_);
}

std::vector<Label> TrainedModel::predict_batch(const LabeledDataset& ds) const {
  if (ds.empty()) return {};
  if (ds.dimension() != dim_) {
    throw InvalidArgument("dataset dimension " + std::to_string(ds.dimension()) +
                          " differs from model dimension " + std::to_string(dim_));
  }
  return predict_batch(ds.feature_data());
}

ordered_json TrainedModel::to_json() const {
  ordered_json j;
  j["format"] = "mlmath-model";
  j["version"] = kModelFormatVersion;
  j["spec"] = mlmath::to_json(spec_);
  j["label_arity"] = arity_;
  j["feature_dim"] = dim_;
  if (standardizer_.active()) {
    j["standardizer"] = {{"mean", standardizer_.mean}, {"scale", standardizer_.scale}};
  } else {
    j["standardizer"] = nullptr;
  }
  j["parameters"] = impl_->to_json();
  return j;
}

TrainedModel TrainedModel::from_json(const ordered_json& j) {
  try {
    if (j.at("format").get<std::string>() != "mlmath-model") throw DataError("not a model document");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model version " + std::to_string(j.at("version").get<int>()));
    }
    LearnerSpec spec = learner_spec_from_json(j.at("spec"));
    Standardizer st;
    if (!j.at("standardizer").is_null()) {
      st.mean = j["standardizer"].at("mean").get<std::vector<double>>();
      st.scale = j["standardizer"].at("scale").get<std::vector<double>>();
    }
    const auto& p = j.at("parameters");
    detail::ImplPtr impl;
    switch (spec.kind()) {
      case LearnerKind::mlp: impl = detail::load_mlp(p); break;
      case LearnerKind::svm: impl = detail::load_svm(p); break;
      case LearnerKind::naive_bayes: impl = detail::load_naive_bayes(p); break;
      case LearnerKind::logistic: impl = detail::load_logistic(p); break;
      case LearnerKind::decision_tree: impl = detail::load_tree(p); break;
      case LearnerKind::random_forest: impl = detail::load_forest(p); break;
      case LearnerKind::knn: impl = detail::load_knn(p); break;
    }
    return TrainedModel(std::move(spec), j.at("label_arity").get<int>(),
                        j.at("feature_dim").get<std::size_t>(), std::move(st), std::move(impl));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model document: ") + e.what());
  }
}

void TrainedModel::save(const std::filesystem::path& path) const {
  write_file_atomic(path, to_json().dump(1) + "\n");
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

TrainedModel fit(const LearnerSpec& spec, const LabeledDataset& train) {
  spec.validate();
  if (train.empty()) throw InvalidArgument("cannot fit on an empty training set");
  const LearnerKind kind = spec.kind();

  Standardizer st;
  const LabeledDataset* data = &train;
  LabeledDataset scaled = train.empty_like();
  if (uses_standardization(kind) && train.kind() == FeatureKind::real) {
    st = Standardizer::fit(train);
    scaled.reserve(train.size());
    std::vector<double> x(train.dimension());
    for (std::size_t i = 0; i < train.size(); ++i) {
      st.apply(train.features(i), x);
      scaled.add(x, train.label(i));
    }
    data = &scaled;
  }

  detail::ImplPtr impl;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) impl = detail::fit_mlp(p, spec.seed, *data);
        else if constexpr (std::is_same_v<T, SvmParams>) impl = detail::fit_svm(p, spec.seed, *data);
        else if constexpr (std::is_same_v<T, NaiveBayesParams>) impl = detail::fit_naive_bayes(p, *data);
        else if constexpr (std::is_same_v<T, LogisticParams>) impl = detail::fit_logistic(p, spec.seed, *data);
        else if constexpr (std::is_same_v<T, TreeParams>) impl = detail::fit_tree(p, spec.seed, *data);
        else if constexpr (std::is_same_v<T, ForestParams>) impl = detail::fit_forest(p, spec.seed, *data);
        else if constexpr (std::is_same_v<T, KnnParams>) impl = detail::fit_knn(p, *data);
      },
      spec.params);
  return TrainedModel(spec, train.label_arity(), train.dimension(), std::move(st), std::move(impl));
}

}  // namespace mlmath
