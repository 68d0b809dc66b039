#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "mlmath/dataset.hpp"
#include "mlmath/learners.hpp"
#include "mlmath/rng.hpp"

namespace mlmath {

/// Hidden widths, their activation, and the softmax output arity. An empty
/// `hidden` list is a single linear layer followed by softmax.
struct MlpArchitecture {
  std::size_t inputs = 1;
  std::vector<std::size_t> hidden;
  Activation activation = Activation::relu;
  int outputs = 2;
};

/// Dense feed-forward network with softmax cross-entropy loss. Parameters are
/// kept in one flat vector: for each layer, the weight matrix (out x in,
/// row-major) followed by the bias vector.
class Mlp {
 public:
  explicit Mlp(MlpArchitecture arch);

  const MlpArchitecture& architecture() const { return arch_; }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  /// He (relu) or Xavier (sigmoid) scaled normal weights, zero biases.
  void initialize(Rng& rng);

  /// Softmax probabilities for one input.
  std::vector<double> probabilities(std::span<const double> x) const;
  Label predict(std::span<const double> x) const;

  /// Cross-entropy of one example; adds d(loss)/d(params) into `grad` when
  /// it is non-empty.
  double loss_and_gradient(std::span<const double> x, Label y, std::span<double> grad) const;

  /// One gradient-descent epoch over `order` in mini-batches. `l2` adds
  /// (l2/2)||W||^2 over weight matrices (not biases) to the mean batch loss.
  void train_epoch(const LabeledDataset& ds, std::span<const std::size_t> order,
                   double learning_rate, std::size_t batch, double l2 = 0.0);

  nlohmann::ordered_json to_json() const;
  static Mlp from_json(const nlohmann::ordered_json& j);

 private:
  std::size_t layer_count() const { return widths_.size() - 1; }

  MlpArchitecture arch_;
  std::vector<std::size_t> widths_;   // inputs, hidden..., outputs
  std::vector<std::size_t> offsets_;  // start of each layer's weights
  std::vector<double> params_;
};

/// Maximum over all parameters of |g_bp - g_fd| / max(|g_bp| + |g_fd|, 1e-6),
/// where g_fd is the central difference with step epsilon. The network is
/// initialised from `seed`.
double mlp_gradient_check(const MlpArchitecture& arch, const Example& sample, double epsilon,
                          RngSeed seed = RngSeed{1});

}  // namespace mlmath
