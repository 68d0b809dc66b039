#include "mlmath/geometry.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mlmath/error.hpp"
#include "mlmath/io.hpp"

namespace mlmath {

int quadratic_root_count(GaussianInt a, GaussianInt b, GaussianInt c) {
  if (a == GaussianInt{}) throw InvalidArgument("leading coefficient must be nonzero");
  const GaussianInt disc = b * b - GaussianInt{4, 0} * a * c;
  return disc == GaussianInt{} ? 1 : 2;
}

int quadratic_real_root_count(std::int64_t a, std::int64_t b, std::int64_t c) {
  if (a == 0) throw InvalidArgument("leading coefficient must be nonzero");
  const std::int64_t disc = b * b - 4 * a * c;
  return disc < 0 ? 0 : (disc == 0 ? 1 : 2);
}

namespace {

// Every (a, b, c) in the box with a != 0 and b^2 = 4ac: for each (a, b) the
// only candidate is c = b^2 / (4a), kept when it is a Gaussian integer in range.
std::vector<std::array<GaussianInt, 3>> double_root_triples(std::int64_t bound, bool real_only) {
  std::vector<std::array<GaussianInt, 3>> out;
  const std::int64_t im_bound = real_only ? 0 : bound;
  for (std::int64_t ar = -bound; ar <= bound; ++ar) {
    for (std::int64_t ai = -im_bound; ai <= im_bound; ++ai) {
      const GaussianInt a{ar, ai};
      if (a == GaussianInt{}) continue;
      const GaussianInt four_a = GaussianInt{4, 0} * a;
      const std::int64_t norm = four_a.re * four_a.re + four_a.im * four_a.im;
      for (std::int64_t br = -bound; br <= bound; ++br) {
        for (std::int64_t bi = -im_bound; bi <= im_bound; ++bi) {
          const GaussianInt b{br, bi};
          const GaussianInt num = b * b * GaussianInt{four_a.re, -four_a.im};
          if (num.re % norm != 0 || num.im % norm != 0) continue;
          const GaussianInt c{num.re / norm, num.im / norm};
          if (std::abs(c.re) > bound || std::abs(c.im) > bound) continue;
          out.push_back({a, b, c});
        }
      }
    }
  }
  return out;
}

}  // namespace

LabeledDataset gen_quadratic_multiplicity(std::size_t count, std::int64_t bound, RngSeed seed) {
  if (count < 2) throw InvalidArgument("count must be at least 2");
  if (bound < 1) throw InvalidArgument("bound must be at least 1");
  Rng rng(derive(seed, "quadratic"));
  LabeledDataset raw(FeatureShape::flat(6), 2, "quadratic", FeatureKind::integer);
  auto add = [&raw](GaussianInt a, GaussianInt b, GaussianInt c) {
    raw.add(std::vector<double>{double(a.re), double(a.im), double(b.re), double(b.im), double(c.re), double(c.im)},
            quadratic_root_count(a, b, c) - 1);
  };
  // Double roots are too rare for uniform draws to supply a usable class, so
  // the whole double-root population of the box is enumerated.
  const auto doubles = double_root_triples(bound, false);
  raw.reserve(count + doubles.size());
  for (const auto& t : doubles) add(t[0], t[1], t[2]);
  auto draw = [&] { return GaussianInt{rng.between(-bound, bound), rng.between(-bound, bound)}; };
  for (std::size_t i = 0; i < count;) {
    const GaussianInt a = draw(), b = draw(), c = draw();
    if (a == GaussianInt{}) continue;  // degree drop
    add(a, b, c);
    ++i;
  }
  auto unique = remove_duplicates(raw);
  auto counts = unique.class_counts();
  if (counts[0] == 0 || counts[1] == 0) {
    throw InvalidArgument("bound " + std::to_string(bound) + " leaves a root-multiplicity class empty");
  }
  auto out = balance_downsample(unique, derive(seed, "balance"));
  out.label_names = {"r=1", "r=2"};
  out.metadata["uniform_draws"] = std::to_string(count);
  out.metadata["double_root_population"] = std::to_string(doubles.size());
  out.metadata["bound"] = std::to_string(bound);
  return out;
}

LabeledDataset gen_quadratic_real_roots(std::size_t count, std::int64_t bound, RngSeed seed) {
  if (count < 2) throw InvalidArgument("count must be at least 2");
  if (bound < 1) throw InvalidArgument("bound must be at least 1");
  Rng rng(derive(seed, "quadratic-real"));
  LabeledDataset raw(FeatureShape::flat(3), 3, "quadratic-real", FeatureKind::integer);
  const auto doubles = double_root_triples(bound, true);
  raw.reserve(count + doubles.size());
  for (const auto& t : doubles) {
    raw.add(std::vector<double>{double(t[0].re), double(t[1].re), double(t[2].re)}, 1);
  }
  for (std::size_t i = 0; i < count;) {
    const auto a = rng.between(-bound, bound), b = rng.between(-bound, bound), c = rng.between(-bound, bound);
    if (a == 0) continue;
    raw.add(std::vector<double>{double(a), double(b), double(c)}, quadratic_real_root_count(a, b, c));
    ++i;
  }
  auto unique = remove_duplicates(raw);
  for (auto n : unique.class_counts()) {
    if (n == 0) throw InvalidArgument("bound " + std::to_string(bound) + " leaves a real-root class empty");
  }
  auto out = balance_downsample(unique, derive(seed, "balance"));
  out.label_names = {"0 real roots", "1 real root", "2 real roots"};
  out.metadata["uniform_draws"] = std::to_string(count);
  out.metadata["double_root_population"] = std::to_string(doubles.size());
  out.metadata["bound"] = std::to_string(bound);
  return out;
}

LabeledDataset gen_parity_functions(std::size_t count, RngSeed seed) {
  if (count < 2) throw InvalidArgument("count must be at least 2");
  Rng rng(derive(seed, "parity"));
  LabeledDataset ds(FeatureShape::flat(4), 2, "parity", FeatureKind::real);
  ds.reserve(count);
  const std::size_t pairs = count / 2;
  for (std::size_t i = 0; i < pairs; ++i) {
    double x = 0, y = 0;
    do {
      x = rng.uniform(0.0, M_PI);
      y = rng.uniform(-1.0, 1.0);
    } while (std::abs(y) < 1e-6);
    ds.add(std::vector<double>{x, y, -x, y}, 1);
    ds.add(std::vector<double>{x, y, -x, -y}, 0);
  }
  // Interleaved by construction; shuffle so that order carries no signal.
  Rng order(derive(seed, "parity-order"));
  auto perm = order.permutation(ds.size());
  auto out = ds.subset(perm);
  out.label_names = {"odd", "even"};
  return out;
}

// ---------------------------------------------------------------- CICY

void ConfigurationMatrix::validate() const {
  const std::size_t m = rows();
  if (m == 0) throw InvalidArgument("configuration has no rows");
  if (m > 12) throw InvalidArgument("configuration has " + std::to_string(m) + " rows, more than 12");
  if (equations < 1 || equations > 15) throw InvalidArgument("number of equations K must be in [1, 15]");
  if (degrees.size() != m * cols()) throw InvalidArgument("degree matrix has the wrong size");
  const int dim_sum = std::accumulate(ambient_dims.begin(), ambient_dims.end(), 0);
  if (equations != dim_sum - 3) {
    throw InvalidArgument("threefold dimension fails: K = " + std::to_string(equations) + " but sum n_r - 3 = " +
                          std::to_string(dim_sum - 3));
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (ambient_dims[r] < 1) throw InvalidArgument("ambient dimension must be positive");
    int s = 0;
    for (std::size_t j = 0; j < cols(); ++j) {
      const int q = degree(r, j);
      if (q < 0 || q > 5) throw InvalidArgument("degree entry outside [0, 5]");
      s += q;
    }
    if (s != ambient_dims[r] + 1) {
      throw InvalidArgument("Calabi-Yau degree condition fails in row " + std::to_string(r + 1) + ": sum " +
                            std::to_string(s) + " != n_r + 1 = " + std::to_string(ambient_dims[r] + 1));
    }
  }
  if (h11 && (*h11 < 1 || *h11 > 19)) throw InvalidArgument("h11 outside [1, 19]");
}

ConfigurationMatrix ConfigurationMatrix::permuted(std::span<const std::size_t> row_perm,
                                                  std::span<const std::size_t> col_perm) const {
  ConfigurationMatrix out = *this;
  for (std::size_t r = 0; r < rows(); ++r) {
    out.ambient_dims[r] = ambient_dims[row_perm[r]];
    for (std::size_t j = 0; j < cols(); ++j) out.degrees[r * cols() + j] = degree(row_perm[r], col_perm[j]);
  }
  return out;
}

namespace {

// Truncated polynomials in J_1..J_m with J_r^{n_r + 1} = 0, stored densely
// over mixed-radix exponent vectors.
class ChowRing {
 public:
  explicit ChowRing(std::vector<int> dims) : dims_(std::move(dims)) {
    size_ = 1;
    for (int n : dims_) {
      stride_.push_back(size_);
      size_ *= static_cast<std::size_t>(n + 1);
    }
    degree_.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      int d = 0;
      for (std::size_t r = 0; r < dims_.size(); ++r) d += exponent(i, r);
      degree_[i] = d;
    }
  }

  using Poly = std::vector<__int128>;

  Poly one() const {
    Poly p(size_, 0);
    p[0] = 1;
    return p;
  }

  int exponent(std::size_t index, std::size_t r) const {
    return static_cast<int>((index / stride_[r]) % static_cast<std::size_t>(dims_[r] + 1));
  }

  // p * (sum_r coeff[r] J_r)
  Poly times_linear(const Poly& p, const std::vector<int>& coeff, int cap) const {
    Poly out(size_, 0);
    for (std::size_t i = 0; i < size_; ++i) {
      if (p[i] == 0 || degree_[i] + 1 > cap) continue;
      for (std::size_t r = 0; r < dims_.size(); ++r) {
        if (coeff[r] == 0 || exponent(i, r) == dims_[r]) continue;
        out[i + stride_[r]] += p[i] * coeff[r];
      }
    }
    return out;
  }

  Poly add(Poly a, const Poly& b, __int128 scale = 1) const {
    for (std::size_t i = 0; i < size_; ++i) a[i] += scale * b[i];
    return a;
  }

  Poly truncate(Poly p, int cap) const {
    for (std::size_t i = 0; i < size_; ++i) {
      if (degree_[i] > cap) p[i] = 0;
    }
    return p;
  }

  Poly multiply(const Poly& a, const Poly& b, int cap) const {
    Poly out(size_, 0);
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < size_; ++j) {
      if (b[j] != 0) nz.push_back(j);
    }
    for (std::size_t i = 0; i < size_; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j : nz) {
        if (degree_[i] + degree_[j] > cap) continue;
        bool fits = true;
        for (std::size_t r = 0; r < dims_.size() && fits; ++r) fits = exponent(i, r) + exponent(j, r) <= dims_[r];
        if (fits) out[i + j] += a[i] * b[j];
      }
    }
    return out;
  }

  int degree(std::size_t i) const { return degree_[i]; }
  std::size_t top() const { return size_ - 1; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> stride_;
  std::vector<int> degree_;
  std::size_t size_ = 0;
};

}  // namespace

std::int64_t cicy_euler_characteristic(const ConfigurationMatrix& config) {
  config.validate();
  const std::size_t m = config.rows();
  ChowRing ring(config.ambient_dims);
  constexpr int cap = 3;
  // Ambient total Chern class: prod_r (1 + J_r)^{n_r + 1}.
  auto c = ring.one();
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<int> unit(m, 0);
    unit[r] = 1;
    for (int e = 0; e <= config.ambient_dims[r]; ++e) {
      c = ring.add(c, ring.times_linear(c, unit, cap));
    }
  }
  // Divide by prod_j (1 + D_j) via the truncated series 1 - D + D^2 - D^3.
  for (std::size_t j = 0; j < config.cols(); ++j) {
    std::vector<int> d(m);
    for (std::size_t r = 0; r < m; ++r) d[r] = config.degree(r, j);
    auto inv = ring.one();
    auto power = ring.one();
    for (int k = 1; k <= cap; ++k) {
      power = ring.times_linear(power, d, cap);
      inv = ring.add(inv, power, (k % 2 == 1) ? -1 : 1);
    }
    c = ring.multiply(c, inv, cap);
  }
  // Keep c_3, then integrate against the class of X: prod_j D_j.
  auto c3 = c;
  for (std::size_t i = 0; i < c3.size(); ++i) {
    if (ring.degree(i) != 3) c3[i] = 0;
  }
  const int top_degree = std::accumulate(config.ambient_dims.begin(), config.ambient_dims.end(), 0);
  for (std::size_t j = 0; j < config.cols(); ++j) {
    std::vector<int> d(m);
    for (std::size_t r = 0; r < m; ++r) d[r] = config.degree(r, j);
    c3 = ring.times_linear(c3, d, top_degree);
  }
  return static_cast<std::int64_t>(c3[ring.top()]);
}

std::vector<ConfigurationMatrix> load_cicy(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<ConfigurationMatrix> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    ++record;
    const std::string where = path.string() + ": record " + std::to_string(record) + " (line " +
                              std::to_string(line_no) + ")";
    try {
      const auto parts = split(t, '|');
      if (parts.size() != 4) throw DataError("expected 4 '|'-separated fields");
      auto ints = [&](std::string_view field) {
        std::vector<int> v;
        std::istringstream s{std::string(field)};
        std::string tok;
        while (s >> tok) v.push_back(static_cast<int>(parse_int(tok, where)));
        return v;
      };
      const auto head = ints(parts[0]);
      if (head.size() != 2) throw DataError("header must be 'm K'");
      ConfigurationMatrix c;
      c.ambient_dims = ints(parts[1]);
      c.equations = head[1];
      if (c.ambient_dims.size() != static_cast<std::size_t>(head[0])) {
        throw DataError("expected " + std::to_string(head[0]) + " ambient dimensions");
      }
      const auto rows = split(parts[2], ';');
      if (rows.size() != c.ambient_dims.size()) throw DataError("row count differs from m");
      for (const auto& r : rows) {
        const auto v = ints(r);
        if (v.size() != static_cast<std::size_t>(c.equations)) throw DataError("row length differs from K");
        c.degrees.insert(c.degrees.end(), v.begin(), v.end());
      }
      const auto hodge = ints(parts[3]);
      if (hodge.size() != 2) throw DataError("expected 'h11 h21'");
      c.h11 = hodge[0];
      c.h21 = hodge[1];
      c.validate();
      out.push_back(std::move(c));
    } catch (const Error& e) {
      const std::string msg = e.what();
      throw DataError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
    }
  }
  if (out.empty()) throw DataError(path.string() + ": no configurations");
  return out;
}

std::optional<std::string> cicy_count_warning(std::size_t loaded) {
  if (loaded == kCicyFullCount) return std::nullopt;
  return "loaded " + std::to_string(loaded) + " configurations; the complete list has " +
         std::to_string(kCicyFullCount);
}

LabeledDataset gen_cicy_hodge_task(const std::vector<ConfigurationMatrix>& configs,
                                   std::size_t copies, RngSeed seed) {
  constexpr std::size_t kRows = 12, kCols = 15;
  std::vector<MatrixExample> items;
  items.reserve(configs.size() * (copies + 1));
  std::size_t index = 0;
  for (const auto& c : configs) {
    if (!c.h11) throw InvalidArgument("configuration " + std::to_string(index + 1) + " has no h11 label");
    Rng rng(derive(derive(seed, "cicy"), index));
    for (std::size_t k = 0; k <= copies; ++k) {
      ConfigurationMatrix v = c;
      if (k > 0) v = c.permuted(rng.permutation(c.rows()), rng.permutation(c.cols()));
      MatrixExample e{v.rows(), v.cols(), std::vector<double>(v.degrees.begin(), v.degrees.end()), *c.h11 - 1};
      items.push_back(std::move(e));
    }
    ++index;
  }
  LabeledDataset like(FeatureShape::matrix(kRows, kCols), 19, "cicy-h11", FeatureKind::integer);
  for (int h = 1; h <= 19; ++h) like.label_names.push_back("h11=" + std::to_string(h));
  like.metadata["configurations"] = std::to_string(configs.size());
  like.metadata["copies"] = std::to_string(copies);
  return pad_to_shape(items, kRows, kCols, like);
}

}  // namespace mlmath
