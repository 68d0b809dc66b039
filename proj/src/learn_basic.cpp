// MLP, logistic regression, k-nearest neighbours and naive Bayes.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlmath/error.hpp"
#include "mlmath/kernels.hpp"
#include "mlmath/mlp.hpp"
#include "model_impl.hpp"

namespace mlmath::detail {

using nlohmann::ordered_json;

namespace {

class MlpModel final : public ModelImpl {
 public:
  explicit MlpModel(Mlp net) : net_(std::move(net)) {}
  Label predict(std::span<const double> x) const override { return net_.predict(x); }
  ordered_json to_json() const override { return net_.to_json(); }

 private:
  Mlp net_;
};

Mlp train_network(const MlpArchitecture& arch, RngSeed seed, const LabeledDataset& train,
                  double learning_rate, std::size_t batch, std::size_t epochs, double l2,
                  bool random_init) {
  Mlp net(arch);
  if (random_init) {
    Rng init(derive(seed, "init"));
    net.initialize(init);
  }
  Rng order_rng(derive(seed, "order"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t e = 0; e < epochs; ++e) {
    order_rng.shuffle(order);
    net.train_epoch(train, order, learning_rate, batch, l2);
  }
  return net;
}

// ---------------------------------------------------------------- kNN

class KnnModel final : public ModelImpl {
 public:
  KnnModel(std::size_t k, bool hamming, std::size_t dim, std::vector<double> rows,
           std::vector<Label> labels, int arity)
      : k_(k), hamming_(hamming), dim_(dim), rows_(std::move(rows)), labels_(std::move(labels)),
        arity_(arity) {
    if (hamming_) bits_ = kernels::pack_bits(rows_, dim_);
  }

  Label predict(std::span<const double> x) const override { return classify(x, true); }

  std::vector<Label> predict_rows(std::span<const double> rows, std::size_t dim) const override {
    const std::size_t n = rows.size() / dim;
    std::vector<Label> out(n);
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto r = static_cast<std::size_t>(i);
      out[r] = classify(rows.subspan(r * dim, dim), false);
    }
    return out;
  }

  ordered_json to_json() const override {
    ordered_json j;
    j["k"] = k_;
    j["metric"] = hamming_ ? "hamming" : "euclidean";
    j["dim"] = dim_;
    j["arity"] = arity_;
    j["labels"] = labels_;
    j["rows"] = rows_;
    return j;
  }

 private:
  Label classify(std::span<const double> x, bool parallel) const {
    const std::size_t n = labels_.size();
    std::vector<double> dist(n);
    if (hamming_) {
      const auto q = kernels::pack_bits(x, dim_);
      std::vector<std::uint32_t> hd(n);
      if (parallel) kernels::omp::hamming_distances(q, bits_, kernels::words_for(dim_), hd);
      else kernels::serial::hamming_distances(q, bits_, kernels::words_for(dim_), hd);
      for (std::size_t i = 0; i < n; ++i) dist[i] = hd[i];
    } else {
      if (parallel) kernels::omp::sq_distances(x, rows_, dim_, dist);
      else kernels::serial::sq_distances(x, rows_, dim_, dist);
    }
    const std::size_t k = std::min(k_, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto closer = [&](std::size_t a, std::size_t b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(), closer);
    std::vector<double> votes(static_cast<std::size_t>(arity_), 0.0);
    for (std::size_t t = 0; t < k; ++t) votes[static_cast<std::size_t>(labels_[idx[t]])] += 1.0;
    return argmax(votes);
  }

  std::size_t k_;
  bool hamming_;
  std::size_t dim_;
  std::vector<double> rows_;
  std::vector<Label> labels_;
  int arity_;
  std::vector<std::uint64_t> bits_;
};

// ---------------------------------------------------------------- naive Bayes

struct NbFeature {
  bool categorical = true;
  std::vector<double> values;  // sorted distinct training values (categorical)
  double threshold = 0.0;      // median (Bernoulli)
  std::vector<double> log_prob;  // [class][bucket]
  std::size_t buckets = 0;

  std::size_t bucket(double v) const {
    if (!categorical) return v > threshold ? 1 : 0;
    auto it = std::lower_bound(values.begin(), values.end(), v);
    if (it != values.end() && *it == v) return static_cast<std::size_t>(it - values.begin());
    return values.size();  // unseen value
  }
};

class NaiveBayesModel final : public ModelImpl {
 public:
  NaiveBayesModel(int arity, std::vector<double> log_prior, std::vector<NbFeature> features)
      : arity_(arity), log_prior_(std::move(log_prior)), features_(std::move(features)) {}

  Label predict(std::span<const double> x) const override {
    std::vector<double> score = log_posteriors(x);
    return argmax(score);
  }

  std::vector<double> log_posteriors(std::span<const double> x) const {
    std::vector<double> score = log_prior_;
    for (std::size_t j = 0; j < features_.size(); ++j) {
      const auto& f = features_[j];
      const std::size_t b = f.bucket(x[j]);
      for (int c = 0; c < arity_; ++c) {
        score[static_cast<std::size_t>(c)] += f.log_prob[static_cast<std::size_t>(c) * f.buckets + b];
      }
    }
    return score;
  }

  ordered_json to_json() const override {
    ordered_json j;
    j["arity"] = arity_;
    j["log_prior"] = log_prior_;
    ordered_json fs = ordered_json::array();
    for (const auto& f : features_) {
      ordered_json e;
      e["categorical"] = f.categorical;
      e["values"] = f.values;
      e["threshold"] = f.threshold;
      e["buckets"] = f.buckets;
      e["log_prob"] = f.log_prob;
      fs.push_back(e);
    }
    j["features"] = fs;
    return j;
  }

 private:
  int arity_;
  std::vector<double> log_prior_;
  std::vector<NbFeature> features_;
};

}  // namespace

ImplPtr fit_mlp(const MlpParams& p, RngSeed seed, const LabeledDataset& train) {
  MlpArchitecture arch{train.dimension(), p.layers, p.activation, train.label_arity()};
  return std::make_shared<MlpModel>(
      train_network(arch, seed, train, p.learning_rate, p.batch_size, p.epochs, 0.0, true));
}

ImplPtr load_mlp(const ordered_json& j) { return std::make_shared<MlpModel>(Mlp::from_json(j)); }

ImplPtr fit_logistic(const LogisticParams& p, RngSeed seed, const LabeledDataset& train) {
  // Convex problem: start from zero weights like the textbook method.
  MlpArchitecture arch{train.dimension(), {}, Activation::sigmoid, train.label_arity()};
  return std::make_shared<MlpModel>(
      train_network(arch, seed, train, p.learning_rate, p.batch_size, p.epochs, p.l2, false));
}

ImplPtr load_logistic(const ordered_json& j) { return load_mlp(j); }

ImplPtr fit_knn(const KnnParams& p, const LabeledDataset& train) {
  bool hamming = false;
  switch (p.metric) {
    case KnnMetric::automatic: hamming = train.kind() == FeatureKind::binary; break;
    case KnnMetric::hamming: hamming = true; break;
    case KnnMetric::euclidean: hamming = false; break;
  }
  const std::size_t k = p.k != 0 ? p.k : (hamming ? 50 : 5);
  std::vector<double> rows(train.feature_data().begin(), train.feature_data().end());
  return std::make_shared<KnnModel>(k, hamming, train.dimension(), std::move(rows), train.labels(),
                                    train.label_arity());
}

ImplPtr load_knn(const ordered_json& j) {
  return std::make_shared<KnnModel>(j.at("k").get<std::size_t>(), j.at("metric") == "hamming",
                                    j.at("dim").get<std::size_t>(),
                                    j.at("rows").get<std::vector<double>>(),
                                    j.at("labels").get<std::vector<Label>>(), j.at("arity").get<int>());
}

ImplPtr fit_naive_bayes(const NaiveBayesParams& p, const LabeledDataset& train) {
  const int arity = train.label_arity();
  const auto n_classes = static_cast<std::size_t>(arity);
  const auto counts = train.class_counts();
  const double n = static_cast<double>(train.size());
  std::vector<double> log_prior(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    log_prior[c] = std::log((static_cast<double>(counts[c]) + p.alpha) / (n + p.alpha * arity));
  }
  std::vector<NbFeature> features(train.dimension());
  std::vector<double> column(train.size());
  for (std::size_t j = 0; j < train.dimension(); ++j) {
    for (std::size_t i = 0; i < train.size(); ++i) column[i] = train.features(i)[j];
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    NbFeature& f = features[j];
    if (distinct.size() <= p.max_categories) {
      f.categorical = true;
      f.values = std::move(distinct);
      f.buckets = f.values.size() + 1;
    } else {
      f.categorical = false;
      f.threshold = sorted[(sorted.size() - 1) / 2];
      f.buckets = 2;
    }
    std::vector<double> tally(n_classes * f.buckets, 0.0);
    for (std::size_t i = 0; i < train.size(); ++i) {
      tally[static_cast<std::size_t>(train.label(i)) * f.buckets + f.bucket(column[i])] += 1.0;
    }
    f.log_prob.resize(tally.size());
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double denom = static_cast<double>(counts[c]) + p.alpha * static_cast<double>(f.buckets);
      for (std::size_t b = 0; b < f.buckets; ++b) {
        f.log_prob[c * f.buckets + b] = std::log((tally[c * f.buckets + b] + p.alpha) / denom);
      }
    }
  }
  return std::make_shared<NaiveBayesModel>(arity, std::move(log_prior), std::move(features));
}

ImplPtr load_naive_bayes(const ordered_json& j) {
  std::vector<NbFeature> features;
  for (const auto& e : j.at("features")) {
    NbFeature f;
    f.categorical = e.at("categorical").get<bool>();
    f.values = e.at("values").get<std::vector<double>>();
    f.threshold = e.at("threshold").get<double>();
    f.buckets = e.at("buckets").get<std::size_t>();
    f.log_prob = e.at("log_prob").get<std::vector<double>>();
    features.push_back(std::move(f));
  }
  return std::make_shared<NaiveBayesModel>(j.at("arity").get<int>(),
                                           j.at("log_prior").get<std::vector<double>>(),
                                           std::move(features));
}

}  // namespace mlmath::detail
