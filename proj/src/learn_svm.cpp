// Soft-margin SVM: SMO with second-order working-set selection, a shared LRU
// kernel-row cache, one-vs-rest for more than two classes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "mlmath/error.hpp"
#include "mlmath/kernels.hpp"
#include "model_impl.hpp"

namespace mlmath::detail {

using nlohmann::ordered_json;

namespace {

constexpr double kTau = 1e-12;

struct KernelFn {
  SvmKernel kind = SvmKernel::rbf;
  double gamma = 1.0;
  std::size_t dim = 0;

  // Row of kernel values between x and every row of `rows`.
  void row(std::span<const double> x, std::span<const double> rows, std::span<const double> norms,
           std::span<double> out) const {
    if (kind == SvmKernel::rbf) {
      const double xn = kernels::dot(x.data(), x.data(), dim);
      kernels::omp::rbf_row(x, xn, rows, norms, dim, gamma, out);
    } else {
      kernels::omp::dot_row(x, rows, dim, out);
    }
  }
};

class KernelCache {
 public:
  KernelCache(const LabeledDataset& ds, KernelFn fn, std::size_t budget_bytes)
      : ds_(ds), fn_(fn), n_(ds.size()) {
    norms_.resize(n_);
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto x = ds.features(i);
      norms_[i] = kernels::dot(x.data(), x.data(), x.size());
      diag_[i] = fn.kind == SvmKernel::rbf ? 1.0 : norms_[i];
    }
    capacity_ = std::max<std::size_t>(2, budget_bytes / (sizeof(double) * std::max<std::size_t>(n_, 1)));
  }

  const double* row(std::size_t i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->values.data();
    }
    if (lru_.size() >= capacity_) {
      auto& victim = lru_.back();
      index_.erase(victim.index);
      lru_.splice(lru_.begin(), lru_, std::prev(lru_.end()));
      lru_.front().index = i;
    } else {
      lru_.push_front(Entry{i, std::vector<double>(n_)});
    }
    index_[i] = lru_.begin();
    fn_.row(ds_.features(i), ds_.feature_data(), norms_, lru_.front().values);
    return lru_.front().values.data();
  }

  double diag(std::size_t i) const { return diag_[i]; }
  std::span<const double> norms() const { return norms_; }

 private:
  struct Entry {
    std::size_t index;
    std::vector<double> values;
  };

  const LabeledDataset& ds_;
  KernelFn fn_;
  std::size_t n_;
  std::size_t capacity_;
  std::vector<double> norms_;
  std::vector<double> diag_;
  std::list<Entry> lru_;
  std::unordered_map<std::size_t, std::list<Entry>::iterator> index_;
};

struct BinarySolution {
  std::vector<double> alpha;
  double rho = 0.0;
};

// Solves min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0 with Q_ij = y_i y_j K_ij.
BinarySolution solve_binary(KernelCache& cache, const std::vector<signed char>& y, double c,
                            double eps, std::size_t max_iter) {
  const std::size_t n = y.size();
  std::vector<double> a(n, 0.0);
  std::vector<double> g(n, -1.0);
  auto is_upper = [&](std::size_t t) { return a[t] >= c; };
  auto is_lower = [&](std::size_t t) { return a[t] <= 0.0; };

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == +1) {
        if (!is_upper(t) && -g[t] >= gmax) {
          gmax = -g[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!is_lower(t) && g[t] >= gmax) {
        gmax = g[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i_sel < 0) break;
    const auto i = static_cast<std::size_t>(i_sel);
    const double* ki = cache.row(i);
    const double yi = y[i];
    const double qd_i = cache.diag(i);

    double gmax2 = -std::numeric_limits<double>::infinity();
    double obj_min = std::numeric_limits<double>::infinity();
    std::ptrdiff_t j_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      const double qit = yi * y[t] * ki[t];
      if (y[t] == +1) {
        if (!is_lower(t)) {
          const double diff = gmax + g[t];
          gmax2 = std::max(gmax2, g[t]);
          if (diff > 0) {
            double quad = qd_i + cache.diag(t) - 2.0 * yi * qit;
            if (quad <= 0) quad = kTau;
            const double obj = -(diff * diff) / quad;
            if (obj <= obj_min) {
              obj_min = obj;
              j_sel = static_cast<std::ptrdiff_t>(t);
            }
          }
        }
      } else if (!is_upper(t)) {
        const double diff = gmax - g[t];
        gmax2 = std::max(gmax2, -g[t]);
        if (diff > 0) {
          double quad = qd_i + cache.diag(t) + 2.0 * yi * qit;
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j_sel = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gmax + gmax2 < eps || j_sel < 0) break;
    const auto j = static_cast<std::size_t>(j_sel);
    const double* kj = cache.row(j);
    ki = cache.row(i);  // i is most recent but re-fetch keeps the pointer honest
    const double yj = y[j];
    const double qij = yi * yj * ki[j];
    const double old_ai = a[i];
    const double old_aj = a[j];

    if (y[i] != y[j]) {
      double quad = qd_i + cache.diag(j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-g[i] - g[j]) / quad;
      const double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0) {
        if (a[j] < 0) {
          a[j] = 0;
          a[i] = diff;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = -diff;
      }
      if (diff > 0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double quad = qd_i + cache.diag(j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (g[i] - g[j]) / quad;
      const double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
      } else if (a[j] < 0) {
        a[j] = 0;
        a[i] = sum;
      }
      if (sum > c) {
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else if (a[i] < 0) {
        a[i] = 0;
        a[j] = sum;
      }
    }
    const double dai = a[i] - old_ai;
    const double daj = a[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      g[t] += y[t] * (yi * ki[t] * dai + yj * kj[t] * daj);
    }
  }

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * g[t];
    if (is_upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y[t] == +1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  BinarySolution s;
  s.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  s.alpha = std::move(a);
  return s;
}

class SvmModel final : public ModelImpl {
 public:
  SvmModel(KernelFn fn, std::vector<double> sv, std::vector<std::vector<double>> coef,
           std::vector<double> rho, int arity)
      : fn_(fn), sv_(std::move(sv)), coef_(std::move(coef)), rho_(std::move(rho)), arity_(arity) {
    const std::size_t m = fn_.dim == 0 ? 0 : sv_.size() / fn_.dim;
    norms_.resize(m);
    for (std::size_t s = 0; s < m; ++s) {
      norms_[s] = kernels::dot(sv_.data() + s * fn_.dim, sv_.data() + s * fn_.dim, fn_.dim);
    }
  }

  std::vector<double> decision_values(std::span<const double> x) const override {
    std::vector<double> k(norms_.size());
    if (!k.empty()) fn_.row(x, sv_, norms_, k);
    std::vector<double> out(coef_.size());
    for (std::size_t m = 0; m < coef_.size(); ++m) {
      // +infinity rho marks a class with no training examples.
      out[m] = std::isinf(rho_[m]) ? -std::numeric_limits<double>::infinity()
                                   : kernels::dot(coef_[m].data(), k.data(), k.size()) - rho_[m];
    }
    return out;
  }

  Label predict(std::span<const double> x) const override {
    const auto f = decision_values(x);
    if (arity_ == 2 && f.size() == 1) return f[0] > 0.0 ? 1 : 0;
    return argmax(f);
  }

  ordered_json to_json() const override {
    ordered_json j;
    j["kernel"] = to_string(fn_.kind);
    j["gamma"] = fn_.gamma;
    j["dim"] = fn_.dim;
    j["arity"] = arity_;
    j["rho"] = ordered_json::array();
    for (double r : rho_) j["rho"].push_back(std::isinf(r) ? ordered_json(nullptr) : ordered_json(r));
    j["coefficients"] = coef_;
    j["support_vectors"] = sv_;
    return j;
  }

 private:
  KernelFn fn_;
  std::vector<double> sv_;
  std::vector<std::vector<double>> coef_;
  std::vector<double> rho_;
  int arity_;
  std::vector<double> norms_;
};

}  // namespace

std::vector<double> ModelImpl::decision_values(std::span<const double>) const {
  throw InvalidArgument("decision values are only defined for svm models");
}

ImplPtr fit_svm(const SvmParams& p, RngSeed, const LabeledDataset& train) {
  const std::size_t n = train.size();
  const std::size_t d = train.dimension();
  KernelFn fn{p.kernel, p.gamma > 0 ? p.gamma : 1.0 / static_cast<double>(d), d};
  KernelCache cache(train, fn, p.cache_mb * 1024 * 1024);
  const std::size_t max_iter = p.max_iterations != 0 ? p.max_iterations : std::max<std::size_t>(1000000, 100 * n);

  const int arity = train.label_arity();
  const std::size_t machines = arity == 2 ? 1 : static_cast<std::size_t>(arity);
  const auto counts = train.class_counts();
  std::vector<std::vector<double>> alpha_y(machines);
  std::vector<double> rho(machines);
  std::vector<char> used(n, 0);
  for (std::size_t m = 0; m < machines; ++m) {
    const Label positive = arity == 2 ? 1 : static_cast<Label>(m);
    std::vector<signed char> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = train.label(i) == positive ? +1 : -1;
    const std::size_t n_pos = counts[static_cast<std::size_t>(positive)];
    if (n_pos == 0 || n_pos == n) {
      // Degenerate one-class machine: constant decision.
      alpha_y[m].assign(n, 0.0);
      rho[m] = n_pos == 0 ? std::numeric_limits<double>::infinity() : -1.0;
      continue;
    }
    auto sol = solve_binary(cache, y, p.c, p.tolerance, max_iter);
    alpha_y[m].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      alpha_y[m][i] = sol.alpha[i] * y[i];
      if (sol.alpha[i] > 0) used[i] = 1;
    }
    rho[m] = sol.rho;
  }

  std::vector<double> sv;
  std::vector<std::vector<double>> coef(machines);
  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i]) continue;
    const auto x = train.features(i);
    sv.insert(sv.end(), x.begin(), x.end());
    for (std::size_t m = 0; m < machines; ++m) coef[m].push_back(alpha_y[m][i]);
  }
  return std::make_shared<SvmModel>(fn, std::move(sv), std::move(coef), std::move(rho), arity);
}

ImplPtr load_svm(const ordered_json& j) {
  KernelFn fn{svm_kernel_from_string(j.at("kernel").get<std::string>()), j.at("gamma").get<double>(),
              j.at("dim").get<std::size_t>()};
  std::vector<double> rho;
  for (const auto& r : j.at("rho")) {
    rho.push_back(r.is_null() ? std::numeric_limits<double>::infinity() : r.get<double>());
  }
  return std::make_shared<SvmModel>(fn, j.at("support_vectors").get<std::vector<double>>(),
                                    j.at("coefficients").get<std::vector<std::vector<double>>>(),
                                    std::move(rho), j.at("arity").get<int>());
}

}  // namespace mlmath::detail
