#include <algorithm>
#include <cmath>

#include "mlmath/kernels.hpp"

namespace mlmath::kernels {

std::vector<std::uint64_t> pack_bits(std::span<const double> rows, std::size_t dim) {
  const std::size_t n = dim == 0 ? 0 : rows.size() / dim;
  const std::size_t words = words_for(dim);
  std::vector<std::uint64_t> out(n * words, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (rows[r * dim + j] != 0.0) out[r * words + j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
  return out;
}

namespace serial {

void sq_distances(std::span<const double> query, std::span<const double> rows, std::size_t dim,
                  std::span<double> out) {
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = sq_distance(query.data(), rows.data() + r * dim, dim);
  }
}

void hamming_distances(std::span<const std::uint64_t> query, std::span<const std::uint64_t> rows,
                       std::size_t words, std::span<std::uint32_t> out) {
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = hamming(query.data(), rows.data() + r * words, words);
  }
}

void rbf_row(std::span<const double> x, double x_norm, std::span<const double> rows,
             std::span<const double> row_norms, std::size_t dim, double gamma,
             std::span<double> out) {
  for (std::size_t r = 0; r < out.size(); ++r) {
    const double d2 = std::max(0.0, x_norm + row_norms[r] - 2.0 * dot(x.data(), rows.data() + r * dim, dim));
    out[r] = std::exp(-gamma * d2);
  }
}

void dot_row(std::span<const double> x, std::span<const double> rows, std::size_t dim,
             std::span<double> out) {
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = dot(x.data(), rows.data() + r * dim, dim);
}

void hamming_matrix(std::span<const std::uint64_t> queries, std::span<const std::uint64_t> rows,
                    std::size_t words, std::span<std::uint32_t> out) {
  const std::size_t n_rows = rows.size() / words;
  const std::size_t n_queries = queries.size() / words;
  for (std::size_t q = 0; q < n_queries; ++q) {
    for (std::size_t r = 0; r < n_rows; ++r) {
      out[q * n_rows + r] = hamming(queries.data() + q * words, rows.data() + r * words, words);
    }
  }
}

}  // namespace serial
}  // namespace mlmath::kernels
