#include "mlmath/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "mlmath/error.hpp"
#include "mlmath/kernels.hpp"

namespace mlmath {

namespace {

double activate(Activation a, double z) {
  if (a == Activation::relu) return z > 0.0 ? z : 0.0;
  return 1.0 / (1.0 + std::exp(-z));
}

// Derivative expressed through the pre-activation z and output value h.
double activate_prime(Activation a, double z, double h) {
  if (a == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
  return h * (1.0 - h);
}

void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (auto& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (auto& v : z) v /= s;
}

}  // namespace

Mlp::Mlp(MlpArchitecture arch) : arch_(std::move(arch)) {
  if (arch_.inputs == 0) throw InvalidArgument("mlp needs at least one input");
  if (arch_.outputs < 1) throw InvalidArgument("mlp needs at least one output");
  widths_.push_back(arch_.inputs);
  for (auto w : arch_.hidden) {
    if (w == 0) throw InvalidArgument("mlp layer widths must be positive");
    widths_.push_back(w);
  }
  widths_.push_back(static_cast<std::size_t>(arch_.outputs));
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(total);
    total += widths_[l + 1] * widths_[l] + widths_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::initialize(Rng& rng) {
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const bool relu_layer = arch_.activation == Activation::relu && l + 1 < layer_count();
    const double sd = std::sqrt((relu_layer ? 2.0 : 1.0) / static_cast<double>(in));
    double* w = params_.data() + offsets_[l];
    for (std::size_t k = 0; k < in * out; ++k) w[k] = sd * rng.normal();
    std::fill(w + in * out, w + in * out + out, 0.0);
  }
}

std::vector<double> Mlp::probabilities(std::span<const double> x) const {
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> z;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * out;
    z.assign(out, 0.0);
    for (std::size_t o = 0; o < out; ++o) z[o] = kernels::dot(w + o * in, a.data(), in) + b[o];
    if (l + 1 < layer_count()) {
      for (auto& v : z) v = activate(arch_.activation, v);
    }
    a.swap(z);
  }
  softmax_inplace(a);
  return a;
}

Label Mlp::predict(std::span<const double> x) const {
  const auto p = probabilities(x);
  return static_cast<Label>(std::max_element(p.begin(), p.end()) - p.begin());
}

double Mlp::loss_and_gradient(std::span<const double> x, Label y, std::span<double> grad) const {
  const std::size_t layers = layer_count();
  std::vector<std::vector<double>> pre(layers), post(layers + 1);
  post[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * out;
    pre[l].resize(out);
    for (std::size_t o = 0; o < out; ++o) pre[l][o] = kernels::dot(w + o * in, post[l].data(), in) + b[o];
    post[l + 1] = pre[l];
    if (l + 1 < layers) {
      for (auto& v : post[l + 1]) v = activate(arch_.activation, v);
    } else {
      softmax_inplace(post[l + 1]);
    }
  }
  const double py = post[layers][static_cast<std::size_t>(y)];
  const double loss = -std::log(std::max(py, 1e-300));
  if (!std::isfinite(loss)) throw Error("non-finite loss");
  if (grad.empty()) return loss;

  std::vector<double> delta = post[layers];
  delta[static_cast<std::size_t>(y)] -= 1.0;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const double* w = params_.data() + offsets_[l];
    double* gw = grad.data() + offsets_[l];
    double* gb = gw + in * out;
    const auto& a = post[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      double* row = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) row[i] += d * a[i];
      gb[o] += d;
    }
    if (l == 0) break;
    std::vector<double> prev(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) prev[i] += row[i] * d;
    }
    for (std::size_t i = 0; i < in; ++i) {
      prev[i] *= activate_prime(arch_.activation, pre[l - 1][i], post[l][i]);
    }
    delta.swap(prev);
  }
  return loss;
}

void Mlp::train_epoch(const LabeledDataset& ds, std::span<const std::size_t> order,
                      double learning_rate, std::size_t batch, double l2) {
  std::vector<double> grad(params_.size());
  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t end = std::min(order.size(), start + batch);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t k = start; k < end; ++k) {
      const std::size_t i = order[k];
      loss_and_gradient(ds.features(i), ds.label(i), grad);
    }
    const double step = learning_rate / static_cast<double>(end - start);
    for (std::size_t p = 0; p < params_.size(); ++p) params_[p] -= step * grad[p];
    if (l2 > 0.0) {
      for (std::size_t l = 0; l < layer_count(); ++l) {
        double* w = params_.data() + offsets_[l];
        const std::size_t count = widths_[l] * widths_[l + 1];
        for (std::size_t k = 0; k < count; ++k) w[k] -= learning_rate * l2 * w[k];
      }
    }
  }
}

nlohmann::ordered_json Mlp::to_json() const {
  nlohmann::ordered_json j;
  j["inputs"] = arch_.inputs;
  j["hidden"] = arch_.hidden;
  j["activation"] = to_string(arch_.activation);
  j["outputs"] = arch_.outputs;
  j["parameters"] = params_;
  return j;
}

Mlp Mlp::from_json(const nlohmann::ordered_json& j) {
  MlpArchitecture arch;
  arch.inputs = j.at("inputs").get<std::size_t>();
  arch.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  arch.activation = activation_from_string(j.at("activation").get<std::string>());
  arch.outputs = j.at("outputs").get<int>();
  Mlp m(arch);
  auto params = j.at("parameters").get<std::vector<double>>();
  if (params.size() != m.params_.size()) throw DataError("mlp parameter count mismatch");
  m.params_ = std::move(params);
  return m;
}

double mlp_gradient_check(const MlpArchitecture& arch, const Example& sample, double epsilon,
                          RngSeed seed) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) throw InvalidArgument("epsilon must be in (0, 1e-3]");
  if (sample.features.size() != arch.inputs) throw InvalidArgument("sample width differs from architecture");
  if (sample.label < 0 || sample.label >= arch.outputs) throw InvalidArgument("sample label out of range");
  Mlp net(arch);
  Rng rng(seed);
  net.initialize(rng);
  // Random biases as well, so the check also covers them away from zero.
  for (auto& p : net.parameters()) {
    if (p == 0.0) p = 0.1 * rng.normal();
  }
  std::vector<double> grad(net.parameters().size(), 0.0);
  net.loss_and_gradient(sample.features, sample.label, grad);
  double worst = 0.0;
  auto& params = net.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = params[k];
    params[k] = saved + epsilon;
    const double up = net.loss_and_gradient(sample.features, sample.label, {});
    params[k] = saved - epsilon;
    const double down = net.loss_and_gradient(sample.features, sample.label, {});
    params[k] = saved;
    const double fd = (up - down) / (2.0 * epsilon);
    const double err = std::abs(grad[k] - fd) / std::max(std::abs(grad[k]) + std::abs(fd), 1e-6);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace mlmath
