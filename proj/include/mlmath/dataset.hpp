#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mlmath/rng.hpp"

namespace mlmath {

using Label = int;

/// How the feature values of a task should be interpreted by learners.
/// Real-valued tasks are standardized before distance/gradient based
/// learners see them; integer and binary tasks are fed raw.
enum class FeatureKind { real, integer, binary };

std::string to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& text);

class FeatureShape {
 public:
  static FeatureShape flat(std::size_t dim);
  static FeatureShape matrix(std::size_t rows, std::size_t cols);

  bool is_matrix() const { return matrix_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return rows_ * cols_; }

  /// "12x15" for matrices, "6" for flat vectors.
  std::string to_string() const;

  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;

 private:
  FeatureShape(std::size_t rows, std::size_t cols, bool matrix)
      : rows_(rows), cols_(cols), matrix_(matrix) {}

  std::size_t rows_ = 1;
  std::size_t cols_ = 1;
  bool matrix_ = false;
};

struct Example {
  std::vector<double> features;
  Label label = 0;
};

/// Ordered (feature vector, label) pairs sharing one shape. Features are held
/// in a single row-major buffer. Construction validates every row; once built
/// a dataset is treated as immutable and may be shared across threads.
class LabeledDataset {
 public:
  LabeledDataset(FeatureShape shape, int label_arity, std::string task_id,
                 FeatureKind kind = FeatureKind::real);

  /// Appends one example. Throws InvalidArgument on a wrong width, an
  /// out-of-range label or a non-finite value.
  void add(std::span<const double> features, Label label);
  void add(const Example& example) { add(example.features, example.label); }
  void reserve(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t dimension() const { return shape_.size(); }
  const FeatureShape& shape() const { return shape_; }
  int label_arity() const { return arity_; }
  const std::string& task_id() const { return task_id_; }
  FeatureKind kind() const { return kind_; }

  std::span<const double> features(std::size_t i) const {
    return {data_.data() + i * shape_.size(), shape_.size()};
  }
  Label label(std::size_t i) const { return labels_[i]; }
  Example example(std::size_t i) const;
  const std::vector<Label>& labels() const { return labels_; }
  std::span<const double> feature_data() const { return data_; }

  std::vector<std::size_t> class_counts() const;

  /// New dataset with the same metadata holding the given rows in order.
  LabeledDataset subset(std::span<const std::size_t> indices) const;
  /// Same metadata, no rows.
  LabeledDataset empty_like() const;
  /// Same rows and metadata, different shape (e.g. after padding).
  LabeledDataset with_shape(FeatureShape shape) const;

  /// Human-readable meaning of each label index (e.g. "h11=19").
  std::vector<std::string> label_names;
  /// Free-form provenance written into reports.
  std::map<std::string, std::string> metadata;

 private:
  FeatureShape shape_;
  int arity_;
  std::string task_id_;
  FeatureKind kind_;
  std::vector<double> data_;
  std::vector<Label> labels_;
};

struct SplitResult {
  LabeledDataset train;
  LabeledDataset validation;
};

enum class PermutationMode { independent_rows_cols, simultaneous };

/// Down-samples every class to the size of the smallest one.
LabeledDataset balance_downsample(const LabeledDataset& ds, RngSeed seed);

/// Down-samples every class to min(per_class, smallest class).
LabeledDataset balance_to(const LabeledDataset& ds, std::size_t per_class, RngSeed seed);

/// Keeps the originals and adds `copies` row/column-permuted versions of each
/// matrix example with the same label.
LabeledDataset augment_permutations(const LabeledDataset& ds, PermutationMode mode,
                                    std::size_t copies, RngSeed seed);

/// Applies row permutation `rows` and column permutation `cols` to a matrix
/// stored row-major: out(i, j) = in(rows[i], cols[j]).
std::vector<double> permute_matrix(std::span<const double> m, std::size_t n_rows,
                                   std::size_t n_cols, std::span<const std::size_t> rows,
                                   std::span<const std::size_t> cols);

/// Embeds each matrix at the top-left of a rows x cols zero matrix.
LabeledDataset pad_to_shape(const LabeledDataset& ds, std::size_t rows, std::size_t cols);

/// A matrix example of its own size, before padding to a common shape.
struct MatrixExample {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  Label label = 0;
};

/// Pads variable-size matrices into one dataset; `like` supplies arity, task
/// id, kind and metadata. Throws naming the first example that does not fit.
LabeledDataset pad_to_shape(std::span<const MatrixExample> items, std::size_t rows,
                            std::size_t cols, const LabeledDataset& like);

/// Drops examples whose feature vector exactly equals an earlier one.
LabeledDataset remove_duplicates(const LabeledDataset& ds);

/// Stratified holdout split. The validation size is floor((1 - f) * N),
/// distributed over classes by largest remainder (ties to the lower label).
SplitResult split_train_val(const LabeledDataset& ds, double train_fraction, RngSeed seed);

/// Stratified k-fold partition: fold i validates on part i.
std::vector<SplitResult> kfold(const LabeledDataset& ds, std::size_t k, RngSeed seed);

/// Index-level variant of kfold; returns the validation indices of each part.
std::vector<std::vector<std::size_t>> kfold_parts(const LabeledDataset& ds, std::size_t k,
                                                  RngSeed seed);

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_csv(const std::filesystem::path& path);

/// Formats a value as an integer when it is one, otherwise with 17
/// significant digits.
std::string format_number(double value);

}  // namespace mlmath
