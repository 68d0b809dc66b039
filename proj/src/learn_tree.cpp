// CART decision trees (Gini) and random forests.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mlmath/error.hpp"
#include "model_impl.hpp"

namespace mlmath::detail {

using nlohmann::ordered_json;

namespace {

struct Node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Label label = 0;
};

class Tree {
 public:
  Label predict(std::span<const double> x) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
      const Node& n = nodes_[static_cast<std::size_t>(at)];
      at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(at)].label;
  }

  ordered_json to_json() const {
    ordered_json a = ordered_json::array();
    for (const auto& n : nodes_) a.push_back({n.feature, n.threshold, n.left, n.right, n.label});
    return a;
  }

  static Tree from_json(const ordered_json& a) {
    Tree t;
    for (const auto& e : a) {
      t.nodes_.push_back(Node{e.at(0).get<int>(), e.at(1).get<double>(), e.at(2).get<int>(),
                              e.at(3).get<int>(), e.at(4).get<Label>()});
    }
    if (t.nodes_.empty()) throw DataError("tree without nodes");
    return t;
  }

  std::vector<Node> nodes_;
};

class TreeBuilder {
 public:
  TreeBuilder(const LabeledDataset& ds, std::size_t max_depth, std::size_t min_leaf,
              std::size_t max_features, Rng* rng)
      : ds_(ds),
        arity_(static_cast<std::size_t>(ds.label_arity())),
        max_depth_(max_depth),
        min_leaf_(min_leaf),
        max_features_(max_features),
        rng_(rng) {}

  Tree build(std::vector<std::size_t> indices) {
    Tree t;
    tree_ = &t;
    grow(indices, 0);
    return t;
  }

 private:
  int grow(std::vector<std::size_t>& idx, std::size_t depth) {
    const int at = static_cast<int>(tree_->nodes_.size());
    tree_->nodes_.push_back(Node{});
    std::vector<double> counts(arity_, 0.0);
    for (auto i : idx) counts[static_cast<std::size_t>(ds_.label(i))] += 1.0;
    tree_->nodes_[static_cast<std::size_t>(at)].label = argmax(counts);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }) <= 1;
    if (pure || depth >= max_depth_ || idx.size() < 2 * min_leaf_) return at;

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_score = -1.0;  // larger is better: sum_l c^2/nl + sum_r c^2/nr
    const auto n = idx.size();
    std::vector<std::pair<double, Label>> column(n);
    std::vector<double> left(arity_), right(arity_);

    for (std::size_t f : candidate_features()) {
      for (std::size_t t = 0; t < n; ++t) column[t] = {ds_.features(idx[t])[f], ds_.label(idx[t])};
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      std::fill(left.begin(), left.end(), 0.0);
      right = counts;
      double sl = 0.0;
      double sr = 0.0;
      for (double c : counts) sr += c * c;
      for (std::size_t t = 0; t + 1 < n; ++t) {
        const auto c = static_cast<std::size_t>(column[t].second);
        sl += 2.0 * left[c] + 1.0;
        sr -= 2.0 * right[c] - 1.0;
        left[c] += 1.0;
        right[c] -= 1.0;
        if (column[t].first == column[t + 1].first) continue;
        const std::size_t nl = t + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double score = sl / static_cast<double>(nl) + sr / static_cast<double>(nr);
        if (score > best_score + 1e-12) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (column[t].first + column[t + 1].first);
          // Midpoints can round onto the upper value; keep the split strict.
          if (!(best_threshold < column[t + 1].first)) best_threshold = column[t].first;
        }
      }
    }
    if (best_feature < 0) return at;

    std::vector<std::size_t> lo, hi;
    for (auto i : idx) {
      (ds_.features(i)[static_cast<std::size_t>(best_feature)] <= best_threshold ? lo : hi).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(lo, depth + 1);
    const int r = grow(hi, depth + 1);
    Node& node = tree_->nodes_[static_cast<std::size_t>(at)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return at;
  }

  std::vector<std::size_t> candidate_features() {
    const std::size_t d = ds_.dimension();
    std::vector<std::size_t> f(d);
    std::iota(f.begin(), f.end(), std::size_t{0});
    if (max_features_ == 0 || max_features_ >= d || rng_ == nullptr) return f;
    for (std::size_t i = 0; i < max_features_; ++i) {
      std::swap(f[i], f[i + rng_->below(d - i)]);
    }
    f.resize(max_features_);
    std::sort(f.begin(), f.end());
    return f;
  }

  const LabeledDataset& ds_;
  std::size_t arity_;
  std::size_t max_depth_;
  std::size_t min_leaf_;
  std::size_t max_features_;
  Rng* rng_;
  Tree* tree_ = nullptr;
};

class TreeModel final : public ModelImpl {
 public:
  explicit TreeModel(Tree t) : tree_(std::move(t)) {}
  Label predict(std::span<const double> x) const override { return tree_.predict(x); }
  ordered_json to_json() const override { return {{"nodes", tree_.to_json()}}; }

 private:
  Tree tree_;
};

class ForestModel final : public ModelImpl {
 public:
  ForestModel(int arity, std::vector<Tree> trees) : arity_(arity), trees_(std::move(trees)) {}

  Label predict(std::span<const double> x) const override {
    std::vector<double> votes(static_cast<std::size_t>(arity_), 0.0);
    for (const auto& t : trees_) votes[static_cast<std::size_t>(t.predict(x))] += 1.0;
    return argmax(votes);
  }

  ordered_json to_json() const override {
    ordered_json a = ordered_json::array();
    for (const auto& t : trees_) a.push_back(t.to_json());
    return {{"arity", arity_}, {"trees", a}};
  }

 private:
  int arity_;
  std::vector<Tree> trees_;
};

}  // namespace

ImplPtr fit_tree(const TreeParams& p, RngSeed, const LabeledDataset& train) {
  TreeBuilder b(train, p.max_depth, p.min_leaf, 0, nullptr);
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return std::make_shared<TreeModel>(b.build(std::move(idx)));
}

ImplPtr load_tree(const ordered_json& j) {
  return std::make_shared<TreeModel>(Tree::from_json(j.at("nodes")));
}

ImplPtr fit_forest(const ForestParams& p, RngSeed seed, const LabeledDataset& train) {
  const std::size_t d = train.dimension();
  const std::size_t m = p.max_features != 0
                            ? p.max_features
                            : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d)))));
  std::vector<Tree> trees(p.trees);
  const auto count = static_cast<std::int64_t>(p.trees);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t t = 0; t < count; ++t) {
    Rng rng(derive(seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> sample(train.size());
    for (auto& s : sample) s = rng.below(train.size());
    TreeBuilder b(train, p.max_depth, p.min_leaf, m, &rng);
    trees[static_cast<std::size_t>(t)] = b.build(std::move(sample));
  }
  return std::make_shared<ForestModel>(train.label_arity(), std::move(trees));
}

ImplPtr load_forest(const ordered_json& j) {
  std::vector<Tree> trees;
  for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
  return std::make_shared<ForestModel>(j.at("arity").get<int>(), std::move(trees));
}

}  // namespace mlmath::detail
