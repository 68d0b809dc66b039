#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlmath/dataset.hpp"
#include "mlmath/rng.hpp"

namespace mlmath {

struct GaussianInt {
  std::int64_t re = 0;
  std::int64_t im = 0;

  friend GaussianInt operator+(GaussianInt a, GaussianInt b) { return {a.re + b.re, a.im + b.im}; }
  friend GaussianInt operator-(GaussianInt a, GaussianInt b) { return {a.re - b.re, a.im - b.im}; }
  friend GaussianInt operator*(GaussianInt a, GaussianInt b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(GaussianInt, GaussianInt) = default;
};

/// Number of distinct complex roots (1 or 2) of a z^2 + b z + c, a != 0.
int quadratic_root_count(GaussianInt a, GaussianInt b, GaussianInt c);

/// Number of distinct real roots (0, 1 or 2) of a x^2 + b x + c, a != 0.
int quadratic_real_root_count(std::int64_t a, std::int64_t b, std::int64_t c);

/// Features (Re a, Im a, Re b, Im b, Re c, Im c); label 0 for a double root,
/// 1 for two distinct roots. `count` raw draws are deduplicated and balanced.
LabeledDataset gen_quadratic_multiplicity(std::size_t count, std::int64_t bound, RngSeed seed);

/// Features (a, b, c); label = number of distinct real roots. Deduplicated and
/// balanced.
LabeledDataset gen_quadratic_real_roots(std::size_t count, std::int64_t bound, RngSeed seed);

/// (x, y, -x, y) -> 1 and (x, y, -x, -y) -> 0 for (x, y) uniform on
/// [0, pi] x [-1, 1], |y| >= 1e-6; count/2 of each.
LabeledDataset gen_parity_functions(std::size_t count, RngSeed seed);

/// A complete-intersection configuration in a product of projective spaces.
/// Row r holds the degrees of the K equations in the factor P^{n_r}.
struct ConfigurationMatrix {
  std::vector<int> ambient_dims;  // n_1..n_m
  std::vector<int> degrees;       // m x K, row-major
  int equations = 0;              // K
  std::optional<int> h11;
  std::optional<int> h21;

  std::size_t rows() const { return ambient_dims.size(); }
  std::size_t cols() const { return static_cast<std::size_t>(equations); }
  int degree(std::size_t r, std::size_t j) const { return degrees[r * cols() + j]; }

  /// Throws InvalidArgument describing the first violated condition:
  /// K = sum n_r - 3, each row sum = n_r + 1, entries in [0, 5], m <= 12,
  /// K <= 15, h11 in [1, 19] when present.
  void validate() const;

  /// Rows permuted by `rows` (ambient dims follow) and columns by `cols`.
  ConfigurationMatrix permuted(std::span<const std::size_t> rows,
                               std::span<const std::size_t> cols) const;
};

/// Euler characteristic from the Chern classes of the ambient space and the
/// normal bundle; equals 2 (h11 - h21) for a smooth member.
std::int64_t cicy_euler_characteristic(const ConfigurationMatrix& config);

/// Parses the text format `m K | n_1..n_m | q_11..q_1K ; ... | h11 h21`.
/// Throws DataError naming the record (line) number on any violation.
std::vector<ConfigurationMatrix> load_cicy(const std::filesystem::path& path);

/// The size of the complete classified list.
inline constexpr std::size_t kCicyFullCount = 7890;

/// Warning text when a loaded list does not have the expected size.
std::optional<std::string> cicy_count_warning(std::size_t loaded);

/// Each configuration (and `copies` independently row/column permuted
/// versions of it) padded to 12 x 15; label h11 - 1 over 19 classes.
LabeledDataset gen_cicy_hodge_task(const std::vector<ConfigurationMatrix>& configs,
                                   std::size_t copies, RngSeed seed);

}  // namespace mlmath
