// Serial vs OpenMP kernels at sizes typical of the default experiments.
#include <benchmark/benchmark.h>

#include <vector>

#include "mlmath/kernels.hpp"
#include "mlmath/rng.hpp"

namespace k = mlmath::kernels;

namespace {

struct Data {
  std::vector<double> rows;
  std::vector<double> query;
  std::vector<double> norms;
  std::size_t n, dim;
};

Data make(std::size_t n, std::size_t dim, bool binary) {
  mlmath::Rng rng(mlmath::RngSeed{n * 31 + dim});
  Data d{std::vector<double>(n * dim), std::vector<double>(dim), std::vector<double>(n), n, dim};
  for (auto& x : d.rows) x = binary ? static_cast<double>(rng.below(2)) : rng.normal();
  for (auto& x : d.query) x = binary ? static_cast<double>(rng.below(2)) : rng.normal();
  for (std::size_t r = 0; r < n; ++r) d.norms[r] = k::dot(&d.rows[r * dim], &d.rows[r * dim], dim);
  return d;
}

template <bool Omp>
void BM_sq_distances(benchmark::State& state) {
  const auto d = make(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), false);
  std::vector<double> out(d.n);
  for (auto _ : state) {
    if constexpr (Omp) {
      k::omp::sq_distances(d.query, d.rows, d.dim, out);
    } else {
      k::serial::sq_distances(d.query, d.rows, d.dim, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * d.n));
}

template <bool Omp>
void BM_rbf_row(benchmark::State& state) {
  const auto d = make(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), false);
  std::vector<double> out(d.n);
  const double qn = k::dot(d.query.data(), d.query.data(), d.dim);
  for (auto _ : state) {
    if constexpr (Omp) {
      k::omp::rbf_row(d.query, qn, d.rows, d.norms, d.dim, 0.01, out);
    } else {
      k::serial::rbf_row(d.query, qn, d.rows, d.norms, d.dim, 0.01, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * d.n));
}

template <bool Omp>
void BM_dot_row(benchmark::State& state) {
  const auto d = make(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), false);
  std::vector<double> out(d.n);
  for (auto _ : state) {
    if constexpr (Omp) {
      k::omp::dot_row(d.query, d.rows, d.dim, out);
    } else {
      k::serial::dot_row(d.query, d.rows, d.dim, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * d.n));
}

template <bool Omp>
void BM_hamming_matrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const auto d = make(n, dim, true);
  const auto q = make(n / 4, dim, true);
  const auto rows = k::pack_bits(d.rows, dim);
  const auto queries = k::pack_bits(q.rows, dim);
  const auto words = k::words_for(dim);
  std::vector<std::uint32_t> out(q.n * d.n);
  for (auto _ : state) {
    if constexpr (Omp) {
      k::omp::hamming_matrix(queries, rows, words, out);
    } else {
      k::serial::hamming_matrix(queries, rows, words, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * out.size()));
}

}  // namespace

// (rows, dim): parity-sized, 12x12 tables, 70x70 tables
BENCHMARK(BM_sq_distances<false>)->Args({80000, 4})->Args({8000, 144})->Args({8000, 4900});
BENCHMARK(BM_sq_distances<true>)->Args({80000, 4})->Args({8000, 144})->Args({8000, 4900});
BENCHMARK(BM_rbf_row<false>)->Args({80000, 4})->Args({8000, 144})->Args({8000, 4900});
BENCHMARK(BM_rbf_row<true>)->Args({80000, 4})->Args({8000, 144})->Args({8000, 4900});
BENCHMARK(BM_dot_row<false>)->Args({80000, 4})->Args({8000, 144});
BENCHMARK(BM_dot_row<true>)->Args({80000, 4})->Args({8000, 144});
// prime windows: 14400 training rows of 101 bits
BENCHMARK(BM_hamming_matrix<false>)->Args({14400, 101})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hamming_matrix<true>)->Args({14400, 101})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
