#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mlmath/dataset.hpp"
#include "mlmath/rng.hpp"

namespace mlmath {

/// Sieve over odd numbers only; bit i stands for 2i+1.
class PrimeTable {
 public:
  std::uint64_t limit() const { return limit_; }
  /// delta(n); throws InvalidArgument above the limit.
  bool is_prime(std::uint64_t n) const;
  const std::vector<std::uint32_t>& primes() const { return primes_; }
  /// Number of primes <= n.
  std::size_t count_upto(std::uint64_t n) const;

 private:
  friend PrimeTable prime_sieve(std::uint64_t limit);
  std::uint64_t limit_ = 0;
  std::vector<bool> odd_;  // odd_[i] <=> 2i+1 prime
  std::vector<std::uint32_t> primes_;
};

/// Eratosthenes up to `limit` (>= 3).
PrimeTable prime_sieve(std::uint64_t limit);

/// lambda(n) = (-1)^Omega(n) by trial division over the table's primes; n >= 1
/// and n <= limit^2.
int liouville(std::uint64_t n, const PrimeTable& table);

struct WindowSpec {
  std::size_t window = 100;
  std::size_t offset = 10000;
  std::size_t i_min = 1;
  std::size_t i_max = 50000;
  std::size_t per_class = 9000;  // 0 keeps every window, in order of i
};

/// Features delta(2i+1), delta(2i+3), ..., delta(2(i+w)+1) (w+1 values);
/// label delta(2(i+w+k)+1); one example per i, down-sampled to per_class.
LabeledDataset gen_prime_window_task(const WindowSpec& spec, RngSeed seed);
LabeledDataset gen_prime_window_task(const WindowSpec& spec, const PrimeTable& table, RngSeed seed);

/// The same windows with lambda in place of delta, -1 -> 0 and +1 -> 1.
LabeledDataset gen_liouville_task(const WindowSpec& spec, RngSeed seed);
LabeledDataset gen_liouville_task(const WindowSpec& spec, const PrimeTable& table, RngSeed seed);

/// Most significant digit first, exactly `width` digits.
std::vector<int> digits(std::uint64_t n, unsigned base, std::size_t width);

struct ModpParams {
  std::uint64_t n_min = 1;
  std::uint64_t n_max = 65535;
  unsigned base = 2;
  std::size_t count = 20000;
};

/// Features: digits of n (width of n_max); label n mod p. n drawn uniformly,
/// balanced over the p residues.
LabeledDataset gen_modp_fixed_task(std::uint64_t p, const ModpParams& params, RngSeed seed);

/// Features: digits of n then digits of p (width of the largest p); label 1
/// when p divides n. count/(2|p_set|) examples per (p, label) cell.
LabeledDataset gen_modp_variable_task(const std::vector<std::uint64_t>& p_set, const ModpParams& params,
                                      RngSeed seed);

/// y^2 = x^3 + a x + b.
struct EllipticCurve {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::optional<int> rank;
  std::optional<int> torsion;
  std::optional<bool> integer_points;

  /// 4a^3 + 27b^2; the discriminant is -16 times this.
  std::int64_t disc_core() const { return 4 * a * a * a + 27 * b * b; }
  bool singular() const { return disc_core() == 0; }
  /// p odd and p does not divide 4a^3 + 27b^2.
  bool good_at(std::uint64_t p) const;
};

/// p + 1 - #E(F_p) via the quadratic character: -sum_x chi(x^3 + a x + b).
/// Throws InvalidArgument naming p for bad reduction or p = 2.
std::int64_t ap_trace(const EllipticCurve& e, std::uint64_t p);

/// The first `n` odd primes of good reduction (bad primes are skipped, so the
/// vector still has n entries).
std::vector<std::uint64_t> good_primes(const EllipticCurve& e, std::size_t n);

/// Row-major curves x n matrix of a_p over each curve's first n good primes.
std::vector<std::int64_t> gen_ap_vectors(const std::vector<EllipticCurve>& curves, std::size_t n = 100);

/// CSV `a,b,rank,torsion,integer_points`. Throws DataError naming the line for
/// malformed or singular rows.
std::vector<EllipticCurve> load_curve_labels(const std::filesystem::path& path);

enum class CurveProperty { rank, torsion, integer_points };
std::string to_string(CurveProperty p);
CurveProperty curve_property_from_string(const std::string& text);

/// Ranks at or above this share the top class.
inline constexpr int kRankCap = 2;

/// Features: a_p vectors; labels per property. Rank is capped at kRankCap;
/// torsion classes are the distinct orders present, ascending. Balanced when
/// `balance` is set.
LabeledDataset gen_curve_task(const std::vector<EllipticCurve>& curves, CurveProperty property, std::size_t n_primes,
                              bool balance, RngSeed seed);

}  // namespace mlmath
