#pragma once

// Data-parallel inner loops used by the learners. Every kernel exists twice:
// `serial` is the straightforward reference, `omp` splits the outer loop over
// OpenMP threads. Each output element is computed by exactly the same
// sequence of floating-point operations in both, so results are bit-identical
// regardless of thread count. Tests compare the two; bench/ times them.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mlmath::kernels {

/// Packs rows of a binary (0 / nonzero) matrix into 64-bit words per row.
std::vector<std::uint64_t> pack_bits(std::span<const double> rows, std::size_t dim);
inline std::size_t words_for(std::size_t dim) { return (dim + 63) / 64; }

namespace serial {

/// out[r] = || query - rows[r] ||^2
void sq_distances(std::span<const double> query, std::span<const double> rows, std::size_t dim,
                  std::span<double> out);

/// out[r] = popcount(query ^ rows[r]) over packed bit rows.
void hamming_distances(std::span<const std::uint64_t> query, std::span<const std::uint64_t> rows,
                       std::size_t words, std::span<std::uint32_t> out);

/// out[r] = exp(-gamma * || x - rows[r] ||^2), using precomputed squared norms.
void rbf_row(std::span<const double> x, double x_norm, std::span<const double> rows,
             std::span<const double> row_norms, std::size_t dim, double gamma,
             std::span<double> out);

/// out[r] = <x, rows[r]>
void dot_row(std::span<const double> x, std::span<const double> rows, std::size_t dim,
             std::span<double> out);

/// out[q * n_rows + r] = hamming(queries[q], rows[r]) for a whole batch.
void hamming_matrix(std::span<const std::uint64_t> queries, std::span<const std::uint64_t> rows,
                    std::size_t words, std::span<std::uint32_t> out);

}  // namespace serial

namespace omp {

void sq_distances(std::span<const double> query, std::span<const double> rows, std::size_t dim,
                  std::span<double> out);
void hamming_distances(std::span<const std::uint64_t> query, std::span<const std::uint64_t> rows,
                       std::size_t words, std::span<std::uint32_t> out);
void rbf_row(std::span<const double> x, double x_norm, std::span<const double> rows,
             std::span<const double> row_norms, std::size_t dim, double gamma,
             std::span<double> out);
void dot_row(std::span<const double> x, std::span<const double> rows, std::size_t dim,
             std::span<double> out);
void hamming_matrix(std::span<const std::uint64_t> queries, std::span<const std::uint64_t> rows,
                    std::size_t words, std::span<std::uint32_t> out);

}  // namespace omp

/// Dot product with a fixed left-to-right accumulation order, shared by both
/// variants so that they agree exactly.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline double sq_distance(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    s0 += d0 * d0;
    s1 += d1 * d1;
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s0 += d * d;
  }
  return s0 + s1;
}

inline std::uint32_t hamming(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint32_t d = 0;
  for (std::size_t w = 0; w < words; ++w) d += static_cast<std::uint32_t>(__builtin_popcountll(a[w] ^ b[w]));
  return d;
}

}  // namespace mlmath::kernels
