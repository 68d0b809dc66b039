#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "mlmath/error.hpp"
#include "mlmath/geometry.hpp"

using namespace mlmath;

namespace {

const std::filesystem::path kSample = std::filesystem::path(MLMATH_DATA_DIR) / "cicy_sample.txt";

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

// |b^2 - 4ac|^2
std::int64_t disc_norm(GaussianInt a, GaussianInt b, GaussianInt c) {
  auto d = b * b - GaussianInt{4, 0} * a * c;
  return d.re * d.re + d.im * d.im;
}

}  // namespace

TEST_CASE("quadratic root counts") {
  CHECK(quadratic_root_count({1, 0}, {2, 0}, {1, 0}) == 1);
  CHECK(quadratic_root_count({1, 0}, {0, 0}, {1, 0}) == 2);
  CHECK(quadratic_root_count({0, 1}, {2, 2}, {2, 0}) == 1);  // i (z + 1 - i)^2 expanded
  CHECK_THROWS_AS(quadratic_root_count({0, 0}, {1, 0}, {1, 0}), InvalidArgument);
  CHECK(quadratic_real_root_count(1, 0, 1) == 0);
  CHECK(quadratic_real_root_count(1, -2, 1) == 1);
  CHECK(quadratic_real_root_count(1, 0, -1) == 2);
}

TEST_CASE("quadratic multiplicity dataset") {
  auto ds = gen_quadratic_multiplicity(200000, 10, RngSeed{7});
  auto counts = ds.class_counts();
  CHECK(counts[0] == counts[1]);
  CHECK(counts[0] > 2000);
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto f = ds.features(i);
    GaussianInt a{std::int64_t(f[0]), std::int64_t(f[1])}, b{std::int64_t(f[2]), std::int64_t(f[3])},
        c{std::int64_t(f[4]), std::int64_t(f[5])};
    CHECK_FALSE(a == GaussianInt{});
    for (double v : f) CHECK(std::abs(v) <= 10);
    // independent oracle: zero discriminant <=> one distinct root
    CHECK((disc_norm(a, b, c) == 0) == (ds.label(i) == 0));
    CHECK(seen.insert(std::vector<double>(f.begin(), f.end())).second);
  }
  auto again = gen_quadratic_multiplicity(200000, 10, RngSeed{7});
  CHECK(std::equal(ds.feature_data().begin(), ds.feature_data().end(), again.feature_data().begin()));
}

TEST_CASE("real quadratic dataset is balanced and consistent") {
  auto ds = gen_quadratic_real_roots(100000, 20, RngSeed{3});
  auto counts = ds.class_counts();
  CHECK(counts[0] == counts[1]);
  CHECK(counts[1] == counts[2]);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto f = ds.features(i);
    const auto d = f[1] * f[1] - 4 * f[0] * f[2];
    CHECK(ds.label(i) == (d < 0 ? 0 : d == 0 ? 1 : 2));
  }
}

TEST_CASE("parity functions") {
  auto ds = gen_parity_functions(1000, RngSeed{5});
  CHECK(ds.size() == 1000);
  CHECK(ds.class_counts()[0] == 500);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto f = ds.features(i);
    CHECK(f[2] == -f[0]);
    CHECK(f[0] >= 0.0);
    CHECK(f[0] <= M_PI);
    CHECK(std::abs(f[1]) >= 1e-6);
    CHECK(f[3] == (ds.label(i) == 1 ? f[1] : -f[1]));
  }
}

TEST_CASE("cicy sample loads and satisfies the configuration conditions") {
  auto configs = load_cicy(kSample);
  REQUIRE(configs.size() == 50);
  CHECK(cicy_count_warning(configs.size()).has_value());
  CHECK_FALSE(cicy_count_warning(kCicyFullCount).has_value());
  for (const auto& c : configs) {
    int sum_n = 0;
    for (std::size_t r = 0; r < c.rows(); ++r) {
      sum_n += c.ambient_dims[r];
      int row = 0;
      for (std::size_t j = 0; j < c.cols(); ++j) row += c.degree(r, j);
      CHECK(row == c.ambient_dims[r] + 1);
    }
    CHECK(c.equations == sum_n - 3);
    // Euler characteristic from Chern classes agrees with the Hodge numbers
    CHECK(cicy_euler_characteristic(c) == 2 * (*c.h11 - *c.h21));
  }
  CHECK(configs[0].ambient_dims == std::vector<int>{4});
  CHECK(configs[0].degrees == std::vector<int>{5});
  CHECK(cicy_euler_characteristic(configs[0]) == -200);
}

TEST_CASE("cicy loader rejects invalid records with their number") {
  auto p = write_temp("mlmath_bad_cicy.txt", "# comment\n1 1 | 4 | 5 | 1 101\n2 2 | 2 3 | 1 2 ; 2 3 | 2 62\n");
  try {
    load_cicy(p);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("record 2") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
  auto q = write_temp("mlmath_bad_cicy2.txt", "1 1 | 4 | 5 | 25 101\n");
  CHECK_THROWS_AS(load_cicy(q), DataError);
}

TEST_CASE("cicy hodge task") {
  auto configs = load_cicy(kSample);
  const auto& schoen = configs[6];
  REQUIRE(schoen.ambient_dims == std::vector<int>{1, 2, 2});
  REQUIRE(schoen.h11 == 19);
  const auto& nine = configs[8];
  REQUIRE(nine.rows() == 9);

  auto single = gen_cicy_hodge_task({schoen, nine}, 0, RngSeed{1});
  REQUIRE(single.size() == 2);
  CHECK(single.shape() == FeatureShape::matrix(12, 15));
  CHECK(single.label(0) == 18);
  CHECK(single.label(1) == 8);
  auto f = single.features(0);
  CHECK(f[0] == 1);
  CHECK(f[1] == 1);
  CHECK(f[15] == 3);
  CHECK(f[2] == 0);
  double total = 0;
  for (double v : f) total += v;
  CHECK(total == 2 + 3 + 3);

  auto task = gen_cicy_hodge_task(configs, 3, RngSeed{2});
  CHECK(task.size() == configs.size() * 4);
  CHECK(task.label_arity() == 19);
  // every permuted copy keeps the multiset of entries and the label
  for (std::size_t i = 0; i < task.size(); ++i) {
    const auto& src = configs[i / 4];
    CHECK(task.label(i) == *src.h11 - 1);
    std::multiset<double> a, b;
    for (int v : src.degrees) a.insert(v);
    auto g = task.features(i);
    for (std::size_t r = 0; r < src.rows(); ++r)
      for (std::size_t c = 0; c < src.cols(); ++c) b.insert(g[r * 15 + c]);
    CHECK(a == b);
  }
}

TEST_CASE("permuted configurations stay valid") {
  auto configs = load_cicy(kSample);
  Rng rng(RngSeed{11});
  for (const auto& c : configs) {
    auto rp = rng.permutation(c.rows());
    auto cp = rng.permutation(c.cols());
    auto p = c.permuted(rp, cp);
    CHECK_NOTHROW(p.validate());
    CHECK(cicy_euler_characteristic(p) == cicy_euler_characteristic(c));
  }
}
