#include "mlmath/arith.hpp"

#include <algorithm>
#include <sstream>

#include "mlmath/error.hpp"
#include "mlmath/io.hpp"

namespace mlmath {

bool PrimeTable::is_prime(std::uint64_t n) const {
  if (n > limit_) throw InvalidArgument("sieve limit " + std::to_string(limit_) + " does not cover " + std::to_string(n));
  if (n == 2) return true;
  if (n < 2 || n % 2 == 0) return false;
  return odd_[n / 2];
}

std::size_t PrimeTable::count_upto(std::uint64_t n) const {
  if (n > limit_) throw InvalidArgument("sieve limit " + std::to_string(limit_) + " does not cover " + std::to_string(n));
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), n) - primes_.begin());
}

PrimeTable prime_sieve(std::uint64_t limit) {
  if (limit < 3) throw InvalidArgument("sieve limit must be at least 3");
  if (limit > 0xffffffffULL) throw InvalidArgument("sieve limit too large");
  PrimeTable t;
  t.limit_ = limit;
  const std::size_t n_odd = static_cast<std::size_t>(limit / 2 + 1);
  t.odd_.assign(n_odd, true);
  t.odd_[0] = false;  // 1
  for (std::uint64_t p = 3; p * p <= limit; p += 2) {
    if (!t.odd_[p / 2]) continue;
    for (std::uint64_t m = p * p; m <= limit; m += 2 * p) t.odd_[m / 2] = false;
  }
  t.primes_.push_back(2);
  for (std::uint64_t n = 3; n <= limit; n += 2) {
    if (t.odd_[n / 2]) t.primes_.push_back(static_cast<std::uint32_t>(n));
  }
  return t;
}

int liouville(std::uint64_t n, const PrimeTable& table) {
  if (n == 0) throw InvalidArgument("liouville needs n >= 1");
  int omega = 0;
  for (std::uint64_t p : table.primes()) {
    if (p * p > n) break;
    while (n % p == 0) {
      n /= p;
      ++omega;
    }
  }
  if (n > 1) {
    if (n > table.limit() * table.limit()) throw InvalidArgument("sieve too small to factor " + std::to_string(n));
    ++omega;
  }
  return omega % 2 == 0 ? 1 : -1;
}

namespace {

void check(const WindowSpec& s) {
  if (s.window < 1 || s.offset < 1) throw InvalidArgument("window and offset must be >= 1");
  if (s.i_min < 1 || s.i_min > s.i_max) throw InvalidArgument("need 1 <= i_min <= i_max");
}

std::uint64_t window_top(const WindowSpec& s) { return 2 * (s.i_max + s.window + s.offset) + 1; }

// value(n) in {0, 1} for every odd n the windows touch.
template <typename F>
LabeledDataset window_task(const WindowSpec& s, const std::string& id, F value, RngSeed seed) {
  LabeledDataset ds(FeatureShape::flat(s.window + 1), 2, id, FeatureKind::binary);
  const std::size_t span = s.i_max + s.window + s.offset;
  std::vector<double> v(span + 1);
  for (std::size_t j = s.i_min; j <= span; ++j) v[j] = value(2 * static_cast<std::uint64_t>(j) + 1);
  std::vector<double> row(s.window + 1);
  for (std::size_t i = s.i_min; i <= s.i_max; ++i) {
    std::copy(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(i + s.window + 1),
              row.begin());
    ds.add(row, static_cast<Label>(v[i + s.window + s.offset]));
  }
  auto out = s.per_class == 0 ? ds : balance_to(ds, s.per_class, derive(seed, "balance"));
  out.metadata["window"] = std::to_string(s.window);
  out.metadata["offset"] = std::to_string(s.offset);
  out.metadata["i_range"] = std::to_string(s.i_min) + ".." + std::to_string(s.i_max);
  return out;
}

}  // namespace

LabeledDataset gen_prime_window_task(const WindowSpec& spec, RngSeed seed) {
  check(spec);
  return gen_prime_window_task(spec, prime_sieve(window_top(spec)), seed);
}

LabeledDataset gen_prime_window_task(const WindowSpec& spec, const PrimeTable& table, RngSeed seed) {
  check(spec);
  if (table.limit() < window_top(spec)) {
    throw InvalidArgument("sieve limit " + std::to_string(table.limit()) + " below required " +
                          std::to_string(window_top(spec)));
  }
  auto out = window_task(
      spec, "prime-window", [&](std::uint64_t n) { return table.is_prime(n) ? 1.0 : 0.0; }, seed);
  out.label_names = {"composite", "prime"};
  return out;
}

LabeledDataset gen_liouville_task(const WindowSpec& spec, RngSeed seed) {
  check(spec);
  return gen_liouville_task(spec, prime_sieve(window_top(spec)), seed);
}

LabeledDataset gen_liouville_task(const WindowSpec& spec, const PrimeTable& table, RngSeed seed) {
  check(spec);
  auto out = window_task(
      spec, "liouville-window", [&](std::uint64_t n) { return liouville(n, table) > 0 ? 1.0 : 0.0; }, seed);
  out.label_names = {"lambda=-1", "lambda=+1"};
  return out;
}

std::vector<int> digits(std::uint64_t n, unsigned base, std::size_t width) {
  if (base < 2) throw InvalidArgument("base must be >= 2");
  std::vector<int> out(width, 0);
  for (std::size_t i = width; i-- > 0;) {
    out[i] = static_cast<int>(n % base);
    n /= base;
  }
  if (n != 0) throw InvalidArgument("value does not fit in " + std::to_string(width) + " digits");
  return out;
}

namespace {

std::size_t digit_width(std::uint64_t n, unsigned base) {
  std::size_t w = 1;
  while (n >= base) {
    n /= base;
    ++w;
  }
  return w;
}

void check(const ModpParams& m) {
  if (m.base < 2) throw InvalidArgument("base must be >= 2");
  if (m.n_min > m.n_max) throw InvalidArgument("need n_min <= n_max");
  if (m.count < 2) throw InvalidArgument("count must be >= 2");
}

FeatureKind digit_kind(unsigned base) { return base == 2 ? FeatureKind::binary : FeatureKind::integer; }

}  // namespace

LabeledDataset gen_modp_fixed_task(std::uint64_t p, const ModpParams& params, RngSeed seed) {
  check(params);
  if (p < 2 || p > 64) throw InvalidArgument("p must lie in [2, 64]");
  const std::size_t width = digit_width(params.n_max, params.base);
  LabeledDataset ds(FeatureShape::flat(width), static_cast<int>(p), "modp-fixed", digit_kind(params.base));
  Rng rng(derive(seed, "modp-fixed"));
  std::vector<double> row(width);
  for (std::size_t i = 0; i < params.count; ++i) {
    const std::uint64_t n = params.n_min + rng.below(params.n_max - params.n_min + 1);
    const auto d = digits(n, params.base, width);
    std::copy(d.begin(), d.end(), row.begin());
    ds.add(row, static_cast<Label>(n % p));
  }
  auto out = balance_downsample(ds, derive(seed, "balance"));
  for (std::uint64_t r = 0; r < p; ++r) out.label_names.push_back("n mod " + std::to_string(p) + "=" + std::to_string(r));
  out.metadata["p"] = std::to_string(p);
  out.metadata["base"] = std::to_string(params.base);
  out.metadata["n_range"] = std::to_string(params.n_min) + ".." + std::to_string(params.n_max);
  return out;
}

LabeledDataset gen_modp_variable_task(const std::vector<std::uint64_t>& p_set, const ModpParams& params,
                                      RngSeed seed) {
  check(params);
  if (p_set.size() < 2) throw InvalidArgument("variable-p task needs at least two moduli");
  for (auto p : p_set) {
    if (p < 2) throw InvalidArgument("moduli must be >= 2");
  }
  const std::size_t wn = digit_width(params.n_max, params.base);
  const std::size_t wp = digit_width(*std::max_element(p_set.begin(), p_set.end()), params.base);
  LabeledDataset ds(FeatureShape::flat(wn + wp), 2, "modp-variable", digit_kind(params.base));
  Rng rng(derive(seed, "modp-variable"));
  // Each modulus gets the same number of divisible and non-divisible n, so p
  // alone says nothing about the label. n is uniform within each cell.
  const std::size_t cell = std::max<std::size_t>(1, params.count / (2 * p_set.size()));
  std::vector<double> row(wn + wp);
  for (std::size_t k = 0; k < p_set.size(); ++k) {
    const std::uint64_t p = p_set[k];
    const std::uint64_t lo_m = (params.n_min + p - 1) / p, hi_m = params.n_max / p;
    if (hi_m < lo_m) throw InvalidArgument("no multiple of " + std::to_string(p) + " in the n range");
    Rng rng(derive(derive(seed, "modp-variable"), k));
    const auto dp = digits(p, params.base, wp);
    for (Label y : {Label{0}, Label{1}}) {
      for (std::size_t i = 0; i < cell; ++i) {
        std::uint64_t n = 0;
        if (y == 1) {
          n = p * (lo_m + rng.below(hi_m - lo_m + 1));
        } else {
          std::size_t attempts = 0;
          do {
            if (++attempts > 10000) throw InvalidArgument("every n in range is divisible by " + std::to_string(p));
            n = params.n_min + rng.below(params.n_max - params.n_min + 1);
          } while (n % p == 0);
        }
        const auto dn = digits(n, params.base, wn);
        std::copy(dn.begin(), dn.end(), row.begin());
        std::copy(dp.begin(), dp.end(), row.begin() + static_cast<std::ptrdiff_t>(wn));
        ds.add(row, y);
      }
    }
  }
  ds = ds.subset(Rng(derive(seed, "shuffle")).permutation(ds.size()));
  ds.label_names = {"p does not divide n", "p divides n"};
  std::string ps;
  for (auto p : p_set) ps += (ps.empty() ? "" : " ") + std::to_string(p);
  ds.metadata["p_set"] = ps;
  ds.metadata["base"] = std::to_string(params.base);
  ds.metadata["n_range"] = std::to_string(params.n_min) + ".." + std::to_string(params.n_max);
  return ds;
}

bool EllipticCurve::good_at(std::uint64_t p) const {
  if (p % 2 == 0) return false;
  const auto m = static_cast<std::int64_t>(p);
  return ((disc_core() % m) + m) % m != 0;
}

std::int64_t ap_trace(const EllipticCurve& e, std::uint64_t p) {
  if (p < 3 || !e.good_at(p)) {
    throw InvalidArgument("bad reduction at p=" + std::to_string(p) + " for a=" + std::to_string(e.a) +
                          " b=" + std::to_string(e.b));
  }
  const auto m = static_cast<std::int64_t>(p);
  // chi(r) = 1 for nonzero squares, -1 for non-squares, 0 at 0.
  std::vector<signed char> chi(p, -1);
  chi[0] = 0;
  for (std::int64_t y = 1; y < m; ++y) chi[static_cast<std::size_t>(y * y % m)] = 1;
  const std::int64_t a = ((e.a % m) + m) % m;
  const std::int64_t b = ((e.b % m) + m) % m;
  std::int64_t sum = 0;
  for (std::int64_t x = 0; x < m; ++x) {
    const std::int64_t r = ((x * x % m) * x + a * x + b) % m;
    sum += chi[static_cast<std::size_t>(r)];
  }
  return -sum;
}

std::vector<std::uint64_t> good_primes(const EllipticCurve& e, std::size_t n) {
  if (e.singular()) throw InvalidArgument("singular curve");
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 3; out.size() < n; q += 2) {
    bool prime = true;
    for (std::uint64_t d = 3; d * d <= q; d += 2) {
      if (q % d == 0) {
        prime = false;
        break;
      }
    }
    if (prime && e.good_at(q)) out.push_back(q);
  }
  return out;
}

std::vector<std::int64_t> gen_ap_vectors(const std::vector<EllipticCurve>& curves, std::size_t n) {
  std::vector<std::vector<std::uint64_t>> primes(curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c) primes[c] = good_primes(curves[c], n);
  std::vector<std::int64_t> out(curves.size() * n);
  const auto total = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t k = 0; k < total; ++k) {
    const auto c = static_cast<std::size_t>(k) / n;
    const auto j = static_cast<std::size_t>(k) % n;
    out[static_cast<std::size_t>(k)] = ap_trace(curves[c], primes[c][j]);
  }
  return out;
}

std::vector<EllipticCurve> load_curve_labels(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw DataError(e.what());
  }
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<EllipticCurve> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const std::string where = path.filename().string() + " line " + std::to_string(line_no);
    if (!header) {
      if (t != "a,b,rank,torsion,integer_points") {
        throw DataError(where + ": expected header a,b,rank,torsion,integer_points");
      }
      header = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 5) throw DataError(where + ": expected 5 fields, got " + std::to_string(f.size()));
    EllipticCurve e;
    e.a = parse_int(trim(f[0]), where);
    e.b = parse_int(trim(f[1]), where);
    if (std::abs(e.a) > 1000000 || std::abs(e.b) > 1000000000) throw DataError(where + ": coefficient too large");
    e.rank = static_cast<int>(parse_int(trim(f[2]), where));
    e.torsion = static_cast<int>(parse_int(trim(f[3]), where));
    const auto ip = parse_int(trim(f[4]), where);
    if (e.singular()) throw DataError(where + ": singular curve (4a^3 + 27b^2 = 0)");
    if (*e.rank < 0) throw DataError(where + ": negative rank");
    if (*e.torsion < 1 || *e.torsion > 16) throw DataError(where + ": torsion order out of range");
    if (ip != 0 && ip != 1) throw DataError(where + ": integer_points must be 0 or 1");
    e.integer_points = ip == 1;
    out.push_back(e);
  }
  if (!header) throw DataError(path.filename().string() + ": empty curve file");
  return out;
}

std::string to_string(CurveProperty p) {
  switch (p) {
    case CurveProperty::rank: return "rank";
    case CurveProperty::torsion: return "torsion";
    case CurveProperty::integer_points: return "integer_points";
  }
  return "?";
}

CurveProperty curve_property_from_string(const std::string& text) {
  for (auto p : {CurveProperty::rank, CurveProperty::torsion, CurveProperty::integer_points}) {
    if (to_string(p) == text) return p;
  }
  throw InvalidArgument("unknown curve property '" + text + "'");
}

LabeledDataset gen_curve_task(const std::vector<EllipticCurve>& curves, CurveProperty property, std::size_t n_primes,
                              bool balance, RngSeed seed) {
  if (curves.empty()) throw InvalidArgument("no curves");
  if (n_primes < 1) throw InvalidArgument("n_primes must be positive");
  std::vector<int> raw;
  for (const auto& c : curves) {
    std::optional<int> v;
    switch (property) {
      case CurveProperty::rank:
        if (c.rank) v = std::min(*c.rank, kRankCap);
        break;
      case CurveProperty::torsion: v = c.torsion; break;
      case CurveProperty::integer_points:
        if (c.integer_points) v = *c.integer_points ? 1 : 0;
        break;
    }
    if (!v) throw InvalidArgument("curve a=" + std::to_string(c.a) + " b=" + std::to_string(c.b) + " lacks a " + to_string(property) + " label");
    raw.push_back(*v);
  }
  std::vector<int> classes;
  std::vector<std::string> names;
  switch (property) {
    case CurveProperty::rank:
      for (int r = 0; r <= kRankCap; ++r) {
        classes.push_back(r);
        names.push_back(r == kRankCap ? "rank>=" + std::to_string(r) : "rank=" + std::to_string(r));
      }
      break;
    case CurveProperty::torsion:
      classes = raw;
      std::sort(classes.begin(), classes.end());
      classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
      for (int t : classes) names.push_back("torsion=" + std::to_string(t));
      break;
    case CurveProperty::integer_points:
      classes = {0, 1};
      names = {"no integer points", "integer points"};
      break;
  }
  if (classes.size() < 2) throw InvalidArgument("curve labels contain a single class");
  const auto ap = gen_ap_vectors(curves, n_primes);
  LabeledDataset ds(FeatureShape::flat(n_primes), static_cast<int>(classes.size()), "curve-" + to_string(property),
                    FeatureKind::integer);
  std::vector<double> row(n_primes);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (std::size_t j = 0; j < n_primes; ++j) row[j] = static_cast<double>(ap[c * n_primes + j]);
    const auto label = std::lower_bound(classes.begin(), classes.end(), raw[c]) - classes.begin();
    ds.add(row, static_cast<Label>(label));
  }
  LabeledDataset out = balance ? balance_downsample(ds, derive(seed, "balance")) : ds;
  out.label_names = names;
  out.metadata["curves"] = std::to_string(curves.size());
  out.metadata["n_primes"] = std::to_string(n_primes);
  out.metadata["bad_primes"] = "skipped";
  return out;
}

}  // namespace mlmath
