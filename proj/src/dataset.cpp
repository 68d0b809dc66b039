#include "mlmath/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <optional>
#include <unordered_set>

#include "mlmath/error.hpp"
#include "mlmath/io.hpp"

namespace mlmath {

std::string to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::real: return "real";
    case FeatureKind::integer: return "integer";
    case FeatureKind::binary: return "binary";
  }
  return "real";
}

FeatureKind feature_kind_from_string(const std::string& text) {
  if (text == "real") return FeatureKind::real;
  if (text == "integer") return FeatureKind::integer;
  if (text == "binary") return FeatureKind::binary;
  throw InvalidArgument("unknown feature kind '" + text + "'");
}

FeatureShape FeatureShape::flat(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("feature dimension must be positive");
  return {1, dim, false};
}

FeatureShape FeatureShape::matrix(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw InvalidArgument("matrix shape must be positive");
  return {rows, cols, true};
}

std::string FeatureShape::to_string() const {
  if (!matrix_) return std::to_string(cols_);
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

LabeledDataset::LabeledDataset(FeatureShape shape, int label_arity, std::string task_id,
                               FeatureKind kind)
    : shape_(shape), arity_(label_arity), task_id_(std::move(task_id)), kind_(kind) {
  if (label_arity < 1) throw InvalidArgument("label arity must be positive");
}

void LabeledDataset::add(std::span<const double> features, Label label) {
  if (features.size() != shape_.size()) {
    throw InvalidArgument("feature vector has length " + std::to_string(features.size()) +
                          ", expected " + std::to_string(shape_.size()));
  }
  if (label < 0 || label >= arity_) {
    throw InvalidArgument("label " + std::to_string(label) + " outside [0, " +
                          std::to_string(arity_) + ")");
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  }
  data_.insert(data_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

void LabeledDataset::reserve(std::size_t n) {
  data_.reserve(n * shape_.size());
  labels_.reserve(n);
}

Example LabeledDataset::example(std::size_t i) const {
  const auto f = features(i);
  return Example{{f.begin(), f.end()}, labels_[i]};
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(arity_), 0);
  for (Label l : labels_) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

LabeledDataset LabeledDataset::empty_like() const {
  LabeledDataset out(shape_, arity_, task_id_, kind_);
  out.label_names = label_names;
  out.metadata = metadata;
  return out;
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out = empty_like();
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto f = features(i);
    out.data_.insert(out.data_.end(), f.begin(), f.end());
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

LabeledDataset LabeledDataset::with_shape(FeatureShape shape) const {
  if (shape.size() != shape_.size()) throw InvalidArgument("reshape changes feature count");
  LabeledDataset out = *this;
  out.shape_ = shape;
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> indices_by_class(const LabeledDataset& ds) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.label_arity()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.label(i))].push_back(i);
  }
  return by_class;
}

}  // namespace

LabeledDataset balance_to(const LabeledDataset& ds, std::size_t per_class, RngSeed seed) {
  if (ds.empty()) throw InvalidArgument("empty dataset");
  auto by_class = indices_by_class(ds);
  std::size_t m = per_class;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].empty()) {
      throw InvalidArgument("class " + std::to_string(c) + " has no examples");
    }
    m = std::min(m, by_class[c].size());
  }
  Rng rng(derive(seed, "balance"));
  std::vector<std::size_t> keep;
  keep.reserve(m * by_class.size());
  for (auto& idx : by_class) {
    // partial Fisher-Yates: the first m entries are a uniform subsample
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + rng.below(idx.size() - i);
      std::swap(idx[i], idx[j]);
    }
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
  }
  rng.shuffle(keep);
  return ds.subset(keep);
}

LabeledDataset balance_downsample(const LabeledDataset& ds, RngSeed seed) {
  return balance_to(ds, static_cast<std::size_t>(-1), seed);
}

std::vector<double> permute_matrix(std::span<const double> m, std::size_t n_rows,
                                   std::size_t n_cols, std::span<const std::size_t> rows,
                                   std::span<const std::size_t> cols) {
  std::vector<double> out(n_rows * n_cols);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double* src = m.data() + rows[i] * n_cols;
    double* dst = out.data() + i * n_cols;
    for (std::size_t j = 0; j < n_cols; ++j) dst[j] = src[cols[j]];
  }
  return out;
}

LabeledDataset augment_permutations(const LabeledDataset& ds, PermutationMode mode,
                                    std::size_t copies, RngSeed seed) {
  const auto& shape = ds.shape();
  if (!shape.is_matrix()) throw InvalidArgument("augmentation needs matrix-shaped features");
  if (mode == PermutationMode::simultaneous && shape.rows() != shape.cols()) {
    throw InvalidArgument("simultaneous permutation needs a square matrix shape");
  }
  if (copies == 0) throw InvalidArgument("copies must be positive");
  LabeledDataset out = ds.empty_like();
  out.reserve(ds.size() * (copies + 1));
  for (std::size_t i = 0; i < ds.size(); ++i) out.add(ds.features(i), ds.label(i));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Rng rng(derive(seed, i));
    for (std::size_t c = 0; c < copies; ++c) {
      const auto rows = rng.permutation(shape.rows());
      const auto cols = mode == PermutationMode::simultaneous ? rows : rng.permutation(shape.cols());
      out.add(permute_matrix(ds.features(i), shape.rows(), shape.cols(), rows, cols), ds.label(i));
    }
  }
  return out;
}

LabeledDataset pad_to_shape(const LabeledDataset& ds, std::size_t rows, std::size_t cols) {
  const auto& shape = ds.shape();
  if (!shape.is_matrix()) throw InvalidArgument("padding needs matrix-shaped features");
  if (shape.rows() > rows || shape.cols() > cols) {
    throw InvalidArgument("example 0 of shape " + shape.to_string() + " exceeds target " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  LabeledDataset out(FeatureShape::matrix(rows, cols), ds.label_arity(), ds.task_id(), ds.kind());
  out.label_names = ds.label_names;
  out.metadata = ds.metadata;
  out.reserve(ds.size());
  std::vector<double> buf(rows * cols);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const auto f = ds.features(i);
    for (std::size_t r = 0; r < shape.rows(); ++r) {
      std::copy_n(f.data() + r * shape.cols(), shape.cols(), buf.data() + r * cols);
    }
    out.add(buf, ds.label(i));
  }
  return out;
}

LabeledDataset pad_to_shape(std::span<const MatrixExample> items, std::size_t rows,
                            std::size_t cols, const LabeledDataset& like) {
  LabeledDataset out(FeatureShape::matrix(rows, cols), like.label_arity(), like.task_id(),
                     like.kind());
  out.label_names = like.label_names;
  out.metadata = like.metadata;
  out.reserve(items.size());
  std::vector<double> buf(rows * cols);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& m = items[i];
    if (m.values.size() != m.rows * m.cols) {
      throw InvalidArgument("example " + std::to_string(i) + " has inconsistent size");
    }
    if (m.rows > rows || m.cols > cols) {
      throw InvalidArgument("example " + std::to_string(i) + " of shape " +
                            std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                            " exceeds target " + std::to_string(rows) + "x" +
                            std::to_string(cols));
    }
    std::fill(buf.begin(), buf.end(), 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
      std::copy_n(m.values.data() + r * m.cols, m.cols, buf.data() + r * cols);
    }
    out.add(buf, m.label);
  }
  return out;
}

LabeledDataset remove_duplicates(const LabeledDataset& ds) {
  struct RowHash {
    const LabeledDataset* ds;
    std::size_t operator()(std::size_t i) const {
      std::size_t h = 1469598103934665603ULL;
      for (double v : ds->features(i)) {
        h ^= std::hash<double>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return h;
    }
  };
  struct RowEq {
    const LabeledDataset* ds;
    bool operator()(std::size_t a, std::size_t b) const {
      const auto fa = ds->features(a);
      const auto fb = ds->features(b);
      return std::equal(fa.begin(), fa.end(), fb.begin());
    }
  };
  std::unordered_set<std::size_t, RowHash, RowEq> seen(ds.size() * 2 + 1, RowHash{&ds}, RowEq{&ds});
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (seen.insert(i).second) keep.push_back(i);
  }
  return ds.subset(keep);
}

namespace {

// Number of validation examples per class: floor((1 - f) * N) in total,
// spread by largest remainder with ties going to the lower label.
std::vector<std::size_t> validation_quota(const std::vector<std::vector<std::size_t>>& by_class,
                                          std::size_t total, double val_fraction) {
  const auto target = static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(total) + 1e-9));
  std::vector<std::size_t> quota(by_class.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const double exact = val_fraction * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    assigned += quota[c];
    remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first + 1e-12; });
  for (const auto& [rem, c] : remainders) {
    if (assigned >= target) break;
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }
  return quota;
}

}  // namespace

SplitResult split_train_val(const LabeledDataset& ds, double train_fraction, RngSeed seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  if (ds.size() < 2) throw InvalidArgument("split needs at least 2 examples");
  auto by_class = indices_by_class(ds);
  Rng rng(derive(seed, "split"));
  for (auto& idx : by_class) rng.shuffle(idx);
  const auto quota = validation_quota(by_class, ds.size(), 1.0 - train_fraction);
  std::vector<std::size_t> train, val;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& idx = by_class[c];
    val.insert(val.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    train.insert(train.end(), idx.begin() + static_cast<std::ptrdiff_t>(quota[c]), idx.end());
  }
  rng.shuffle(train);
  rng.shuffle(val);
  return {ds.subset(train), ds.subset(val)};
}

std::vector<std::vector<std::size_t>> kfold_parts(const LabeledDataset& ds, std::size_t k,
                                                  RngSeed seed) {
  if (k < 2) throw InvalidArgument("k-fold needs k >= 2");
  if (k > ds.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds dataset size " +
                          std::to_string(ds.size()));
  }
  auto by_class = indices_by_class(ds);
  Rng rng(derive(seed, "kfold"));
  std::vector<std::size_t> order;
  order.reserve(ds.size());
  for (auto& idx : by_class) {
    rng.shuffle(idx);
    order.insert(order.end(), idx.begin(), idx.end());
  }
  // dealing round-robin keeps parts within one of each other and stratified
  std::vector<std::vector<std::size_t>> parts(k);
  for (std::size_t i = 0; i < order.size(); ++i) parts[i % k].push_back(order[i]);
  for (auto& p : parts) rng.shuffle(p);
  return parts;
}

std::vector<SplitResult> kfold(const LabeledDataset& ds, std::size_t k, RngSeed seed) {
  const auto parts = kfold_parts(ds, k, seed);
  std::vector<SplitResult> folds;
  folds.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train.insert(train.end(), parts[g].begin(), parts[g].end());
    }
    folds.push_back({ds.subset(train), ds.subset(parts[f])});
  }
  return folds;
}

std::string format_number(double value) {
  if (value == std::floor(value) && std::fabs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  std::string out;
  out += "# shape=" + ds.shape().to_string() + " labels=" + std::to_string(ds.label_arity()) +
         " task=" + ds.task_id() + " kind=" + to_string(ds.kind()) + "\n";
  for (std::size_t j = 0; j < ds.dimension(); ++j) out += "f" + std::to_string(j) + ",";
  out += "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features(i)) {
      out += format_number(v);
      out += ',';
    }
    out += std::to_string(ds.label(i));
    out += '\n';
  }
  write_file_atomic(path, out);
}

LabeledDataset read_csv(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::optional<FeatureShape> shape;
  int arity = -1;
  std::string task = path.stem().string();
  FeatureKind kind = FeatureKind::real;
  std::size_t width = 0;
  bool header_seen = false;
  std::vector<double> data;
  std::vector<long long> labels;
  const std::string where = path.string() + ":";

  while (std::getline(in, line)) {
    ++line_no;
    const std::string ctx = where + std::to_string(line_no);
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      view.remove_prefix(1);
      for (const auto& token : split(trim(view), ' ')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "shape") {
          const auto x = value.find('x');
          if (x == std::string::npos) {
            shape = FeatureShape::flat(static_cast<std::size_t>(parse_int(value, ctx)));
          } else {
            shape = FeatureShape::matrix(static_cast<std::size_t>(parse_int(value.substr(0, x), ctx)),
                                         static_cast<std::size_t>(parse_int(value.substr(x + 1), ctx)));
          }
        } else if (key == "labels") {
          arity = static_cast<int>(parse_int(value, ctx));
        } else if (key == "task") {
          task = value;
        } else if (key == "kind") {
          kind = feature_kind_from_string(value);
        }
      }
      continue;
    }
    const auto fields = split(view, ',');
    if (!header_seen) {
      if (fields.size() < 2 || trim(fields.back()) != "label") {
        throw DataError(ctx + ": header must end with 'label'");
      }
      for (std::size_t j = 0; j + 1 < fields.size(); ++j) {
        if (trim(fields[j]) != "f" + std::to_string(j)) {
          throw DataError(ctx + ": header column " + std::to_string(j) + " must be f" +
                          std::to_string(j));
        }
      }
      width = fields.size() - 1;
      header_seen = true;
      continue;
    }
    if (fields.size() != width + 1) {
      throw DataError(ctx + ": expected " + std::to_string(width + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < width; ++j) {
      const double v = parse_real(fields[j], ctx);
      if (!std::isfinite(v)) throw DataError(ctx + ": non-finite feature");
      data.push_back(v);
    }
    const long long label = parse_int(fields[width], ctx);
    if (label < 0 || (arity > 0 && label >= arity)) {
      throw DataError(ctx + ": label " + std::to_string(label) + " out of range");
    }
    labels.push_back(label);
  }
  if (!header_seen) throw DataError(where + " missing header line");
  if (!shape) shape = FeatureShape::flat(width);
  if (shape->size() != width) {
    throw DataError(where + " shape " + shape->to_string() + " disagrees with header width " +
                    std::to_string(width));
  }
  if (arity < 0) {
    long long max_label = 0;
    for (auto l : labels) max_label = std::max(max_label, l);
    arity = static_cast<int>(max_label + 1);
  }
  LabeledDataset ds(*shape, arity, task, kind);
  ds.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ds.add(std::span<const double>(data.data() + i * width, width), static_cast<Label>(labels[i]));
  }
  return ds;
}

}  // namespace mlmath
