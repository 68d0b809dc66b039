#include <algorithm>
#include <cmath>
#include <cstdint>

#include "mlmath/kernels.hpp"

namespace mlmath::kernels::omp {

namespace {
// Below this many output elements the fork/join overhead dominates.
constexpr std::int64_t kMinParallel = 2048;
}  // namespace

void sq_distances(std::span<const double> query, std::span<const double> rows, std::size_t dim,
                  std::span<double> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::int64_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] =
        sq_distance(query.data(), rows.data() + static_cast<std::size_t>(r) * dim, dim);
  }
}

void hamming_distances(std::span<const std::uint64_t> query, std::span<const std::uint64_t> rows,
                       std::size_t words, std::span<std::uint32_t> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::int64_t r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] =
        hamming(query.data(), rows.data() + static_cast<std::size_t>(r) * words, words);
  }
}

void rbf_row(std::span<const double> x, double x_norm, std::span<const double> rows,
             std::span<const double> row_norms, std::size_t dim, double gamma,
             std::span<double> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::int64_t r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    const double d2 = std::max(0.0, x_norm + row_norms[i] - 2.0 * dot(x.data(), rows.data() + i * dim, dim));
    out[i] = std::exp(-gamma * d2);
  }
}

void dot_row(std::span<const double> x, std::span<const double> rows, std::size_t dim,
             std::span<double> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::int64_t r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    out[i] = dot(x.data(), rows.data() + i * dim, dim);
  }
}

void hamming_matrix(std::span<const std::uint64_t> queries, std::span<const std::uint64_t> rows,
                    std::size_t words, std::span<std::uint32_t> out) {
  const std::size_t n_rows = rows.size() / words;
  const auto n_queries = static_cast<std::int64_t>(queries.size() / words);
#pragma omp parallel for schedule(static)
  for (std::int64_t q = 0; q < n_queries; ++q) {
    const auto qi = static_cast<std::size_t>(q);
    for (std::size_t r = 0; r < n_rows; ++r) {
      out[qi * n_rows + r] = hamming(queries.data() + qi * words, rows.data() + r * words, words);
    }
  }
}

}  // namespace mlmath::kernels::omp
