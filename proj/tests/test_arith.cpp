#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"
#include "mlmath/arith.hpp"
#include "mlmath/error.hpp"

using namespace mlmath;

namespace {

// Segmented sieve with 32k blocks, independent of prime_sieve.
std::size_t segmented_count(std::uint64_t n) {
  const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n))) + 1;
  std::vector<char> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
  }
  std::size_t count = 0;
  const std::uint64_t block = 32768;
  for (std::uint64_t lo = 2; lo <= n; lo += block) {
    const std::uint64_t hi = std::min(n, lo + block - 1);
    std::vector<char> mark(hi - lo + 1, 1);
    for (auto p : base) {
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t j = start; j <= hi; j += p) mark[j - lo] = 0;
    }
    for (char m : mark) count += m;
  }
  return count;
}

int omega_direct(std::uint64_t n) {
  int k = 0;
  for (std::uint64_t d = 2; n > 1; ++d) {
    while (n % d == 0) {
      n /= d;
      ++k;
    }
  }
  return k;
}

std::int64_t naive_points(const EllipticCurve& e, std::int64_t p) {
  std::int64_t count = 1;  // point at infinity
  for (std::int64_t x = 0; x < p; ++x) {
    for (std::int64_t y = 0; y < p; ++y) {
      const std::int64_t lhs = y * y % p;
      const std::int64_t rhs = (((x * x % p) * x + e.a * x + e.b) % p + p) % p;
      if (lhs == rhs) ++count;
    }
  }
  return count;
}

bool is_small_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("prime sieve") {
  auto t = prime_sieve(30);
  CHECK(t.primes() == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  CHECK(t.is_prime(7));
  CHECK_FALSE(t.is_prime(9));
  CHECK_FALSE(t.is_prime(1));
  CHECK_THROWS_AS(t.is_prime(31), InvalidArgument);
  CHECK_THROWS_AS(prime_sieve(2), InvalidArgument);
  auto big = prime_sieve(1000000);
  CHECK(big.primes().size() == segmented_count(1000000));
  CHECK(big.primes().size() == 78498);
  for (std::uint64_t n = 1; n < 5000; ++n) CHECK(big.is_prime(n) == is_small_prime(n));
}

TEST_CASE("liouville") {
  auto t = prime_sieve(2000);
  CHECK(liouville(1, t) == 1);
  CHECK(liouville(12, t) == -1);
  long sum = 0, ref = 0;
  for (std::uint64_t n = 1; n <= 1000; ++n) {
    sum += liouville(n, t);
    ref += omega_direct(n) % 2 == 0 ? 1 : -1;
  }
  CHECK(sum == ref);
  Rng rng(RngSeed{2});
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t m = 1 + rng.below(1000), n = 1 + rng.below(1000);
    if (i % 2 == 0) n = m * (1 + rng.below(5));  // shares factors with m
    CHECK(liouville(m * n, t) == liouville(m, t) * liouville(n, t));
  }
}

TEST_CASE("prime window task") {
  WindowSpec s{100, 10000, 1, 50000, 9000};
  auto table = prime_sieve(2 * (s.i_max + s.window + s.offset) + 1);
  auto ds = gen_prime_window_task(s, table, RngSeed{1});
  CHECK(ds.shape() == FeatureShape::flat(101));
  auto counts = ds.class_counts();
  CHECK(counts[0] == counts[1]);
  CHECK(counts[1] > 8000);
  CHECK(counts[1] <= 9000);

  WindowSpec small{5, 7, 1, 200, 100000};
  auto all = gen_prime_window_task(small, table, RngSeed{1});
  // every i contributes; rebuild i from the features and check the label
  std::size_t checked = 0;
  for (std::size_t r = 0; r < all.size(); ++r) {
    auto f = all.features(r);
    for (double x : f) CHECK((x == 0.0 || x == 1.0));
    for (std::size_t i = 1; i <= 200; ++i) {
      bool match = true;
      for (std::size_t j = 0; j <= 5 && match; ++j) match = f[j] == (table.is_prime(2 * (i + j) + 1) ? 1.0 : 0.0);
      if (match && all.label(r) == (table.is_prime(2 * (i + 5 + 7) + 1) ? 1 : 0)) {
        ++checked;
        break;
      }
    }
  }
  CHECK(checked == all.size());
  CHECK_THROWS_AS(gen_prime_window_task(s, prime_sieve(1000), RngSeed{1}), InvalidArgument);
}

TEST_CASE("window features reconstruct the sieve") {
  auto table = prime_sieve(200);
  auto ds = gen_prime_window_task(WindowSpec{10, 3, 1, 40, 0}, table, RngSeed{0});
  REQUIRE(ds.size() == 40);
  std::vector<double> stitched(ds.features(0).begin(), ds.features(0).end());
  for (std::size_t r = 1; r < ds.size(); ++r) stitched.push_back(ds.features(r)[10]);
  REQUIRE(stitched.size() == 50);
  for (std::size_t j = 0; j < stitched.size(); ++j) CHECK(stitched[j] == (table.is_prime(2 * (1 + j) + 1) ? 1.0 : 0.0));
  for (std::size_t r = 0; r < ds.size(); ++r) CHECK(ds.label(r) == (table.is_prime(2 * (r + 1 + 10 + 3) + 1) ? 1 : 0));
}

TEST_CASE("liouville window task") {
  WindowSpec s{100, 10000, 1, 50000, 9000};
  auto ds = gen_liouville_task(s, RngSeed{1});
  auto counts = ds.class_counts();
  CHECK(counts[0] == 9000);
  CHECK(counts[1] == 9000);
}

TEST_CASE("mod p tasks") {
  CHECK(digits(6, 2, 3) == std::vector<int>{1, 1, 0});
  CHECK(digits(7, 10, 4) == std::vector<int>{0, 0, 0, 7});
  CHECK_THROWS_AS(digits(8, 2, 3), InvalidArgument);
  ModpParams m{1, 1023, 2, 4000};
  auto fixed = gen_modp_fixed_task(2, m, RngSeed{3});
  CHECK(fixed.shape() == FeatureShape::flat(10));
  for (std::size_t i = 0; i < fixed.size(); ++i) CHECK(fixed.label(i) == static_cast<Label>(fixed.features(i)[9]));
  auto f3 = gen_modp_fixed_task(3, m, RngSeed{3});
  for (std::size_t i = 0; i < f3.size(); ++i) {
    std::uint64_t n = 0;
    for (double d : f3.features(i)) n = 2 * n + static_cast<std::uint64_t>(d);
    CHECK(f3.label(i) == static_cast<Label>(n % 3));
  }
  auto var = gen_modp_variable_task({3, 5, 7}, m, RngSeed{4});
  CHECK(var.shape() == FeatureShape::flat(13));
  CHECK(var.class_counts() == std::vector<std::size_t>{1998, 1998});
  std::map<std::pair<std::uint64_t, Label>, int> cells;
  for (std::size_t i = 0; i < var.size(); ++i) {
    auto f = var.features(i);
    std::uint64_t n = 0, p = 0;
    for (std::size_t j = 0; j < 10; ++j) n = 2 * n + static_cast<std::uint64_t>(f[j]);
    for (std::size_t j = 10; j < 13; ++j) p = 2 * p + static_cast<std::uint64_t>(f[j]);
    CHECK(var.label(i) == (n % p == 0 ? 1 : 0));
    ++cells[{p, var.label(i)}];
  }
  CHECK(cells.size() == 6);
  for (const auto& [key, c] : cells) CHECK(c == 666);
  CHECK_THROWS_AS(gen_modp_variable_task({3}, m, RngSeed{4}), InvalidArgument);
}

TEST_CASE("a_p traces") {
  CHECK(ap_trace({1, 0}, 3) == 0);
  CHECK(naive_points({1, 0}, 3) == 4);
  CHECK(ap_trace({0, 1}, 5) == 5 + 1 - naive_points({0, 1}, 5));
  CHECK_THROWS_AS(ap_trace({-3, 2}, 5), InvalidArgument);  // 4(-27) + 27*4 = 0 mod anything
  CHECK_THROWS_AS(ap_trace({1, 1}, 31), InvalidArgument);  // 4 + 27 = 31
  Rng rng(RngSeed{9});
  int curves = 0;
  while (curves < 100) {
    EllipticCurve e{static_cast<std::int64_t>(rng.below(201)) - 100, static_cast<std::int64_t>(rng.below(201)) - 100};
    if (e.singular()) continue;
    ++curves;
    for (std::int64_t p = 3; p <= 50; p += 2) {
      if (!is_small_prime(static_cast<std::uint64_t>(p)) || !e.good_at(static_cast<std::uint64_t>(p))) continue;
      CHECK(ap_trace(e, static_cast<std::uint64_t>(p)) == p + 1 - naive_points(e, p));
    }
  }
}

TEST_CASE("a_p vectors") {
  std::vector<EllipticCurve> cs = {{-1, 0}, {2, 3}, {-1, 0}, {0, 7}};
  auto v = gen_ap_vectors(cs, 100);
  REQUIRE(v.size() == 400);
  for (std::size_t j = 0; j < 100; ++j) CHECK(v[j] == v[200 + j]);
  for (std::size_t c = 0; c < cs.size(); ++c) {
    auto ps = good_primes(cs[c], 100);
    CHECK(ps.size() == 100);
    for (std::size_t j = 0; j < 100; ++j) {
      CHECK(cs[c].good_at(ps[j]));
      CHECK(std::abs(static_cast<double>(v[c * 100 + j])) <= 2 * std::sqrt(static_cast<double>(ps[j])));
    }
  }
  // a = 2, b = 3: 4*8 + 27*9 = 275 = 5^2 * 11, so 5 and 11 are skipped
  auto ps = good_primes({2, 3}, 4);
  CHECK(ps == std::vector<std::uint64_t>{3, 7, 13, 17});
}

TEST_CASE("curve label sample") {
  const auto curves = load_curve_labels(std::filesystem::path(MLMATH_DATA_DIR) / "curves_sample.csv");
  CHECK(curves.size() == 200);
  for (const auto& e : curves) {
    CAPTURE(e.a);
    CAPTURE(e.b);
    // the torsion subgroup injects into E(F_p) for good p >= 5 (orders here are <= 16)
    for (std::uint64_t p : good_primes(e, 30)) {
      if (p < 5 || p <= static_cast<std::uint64_t>(*e.torsion)) continue;
      const auto points = static_cast<std::int64_t>(p) + 1 - ap_trace(e, p);
      CHECK(points % *e.torsion == 0);
    }
    // rational 2-torsion points are (r, 0) with r an integer root of the cubic
    int roots = 0;
    for (std::int64_t r = -2000; r <= 2000; ++r) roots += r * r * r + e.a * r + e.b == 0;
    CHECK((*e.torsion % 2 == 0) == (roots > 0));
    if (roots == 3) CHECK(*e.torsion % 4 == 0);
    if (roots > 0) CHECK(*e.integer_points);
  }
  const auto& first = curves.front();
  CHECK(first.a == -1);
  CHECK(first.b == 0);
  CHECK(*first.torsion >= 4);
  for (auto prop : {CurveProperty::rank, CurveProperty::torsion, CurveProperty::integer_points}) {
    auto ds = gen_curve_task(curves, prop, 100, true, RngSeed{1});
    auto counts = ds.class_counts();
    for (auto c : counts) CHECK(c == counts[0]);
    CHECK(ds.shape() == FeatureShape::flat(100));
  }
}

TEST_CASE("curve label errors") {
  const auto dir = std::filesystem::temp_directory_path() / "mlmath_curve_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "c.csv";
  {
    std::ofstream(path) << "a,b,rank,torsion,integer_points\n1,1,0,1,1\n\n-3,2,0,1,1\n";
  }
  try {
    load_curve_labels(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    CHECK(std::string(e.what()).find("singular") != std::string::npos);
  }
  {
    std::ofstream(path) << "a,b,rank\n";
  }
  CHECK_THROWS_AS(load_curve_labels(path), DataError);
  CHECK_THROWS_AS(load_curve_labels(dir / "missing.csv"), DataError);
  std::filesystem::remove_all(dir);
}
