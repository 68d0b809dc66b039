// Finite groups, Latin squares and SU(3) tensor products.

#include "mlmath/algebra.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "mlmath/error.hpp"
#include "mlmath/io.hpp"

namespace mlmath {

namespace {

bool is_prime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

FiniteGroup from_rule(std::size_t n, std::string name, auto&& mul) {
  FiniteGroup g;
  g.order = n;
  g.name = std::move(name);
  g.table.resize(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) g.table[a * n + b] = static_cast<int>(mul(a, b));
  }
  return g;
}

// Permutation groups: element 0 is the identity, the rest in lexicographic order.
FiniteGroup permutation_group(std::size_t n, bool even_only, std::string name) {
  std::vector<std::vector<int>> perms;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += p[i] > p[j];
    }
    if (!even_only || inversions % 2 == 0) perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = i;
  return from_rule(perms.size(), std::move(name), [&](std::size_t a, std::size_t b) {
    std::vector<int> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = perms[a][static_cast<std::size_t>(perms[b][i])];
    return index.at(c);
  });
}

std::vector<char> generated(const FiniteGroup& g, const std::vector<int>& gens) {
  std::vector<char> in(g.order, 0);
  std::vector<int> members{0};
  in[0] = 1;
  for (std::size_t k = 0; k < members.size(); ++k) {
    for (int s : gens) {
      const int x = g.op(members[k], s);
      if (!in[static_cast<std::size_t>(x)]) {
        in[static_cast<std::size_t>(x)] = 1;
        members.push_back(x);
      }
    }
  }
  return in;
}

std::vector<int> inverses(const FiniteGroup& g) {
  std::vector<int> inv(g.order, -1);
  for (std::size_t a = 0; a < g.order; ++a) {
    for (std::size_t b = 0; b < g.order; ++b) {
      if (g.op(static_cast<int>(a), static_cast<int>(b)) == 0) inv[a] = static_cast<int>(b);
    }
  }
  return inv;
}

std::size_t count(const std::vector<char>& v) { return static_cast<std::size_t>(std::count(v.begin(), v.end(), 1)); }

}  // namespace

FiniteGroup cyclic_group(std::size_t n) {
  if (n < 1) throw InvalidArgument("cyclic group needs n >= 1");
  auto g = from_rule(n, "C" + std::to_string(n), [n](std::size_t a, std::size_t b) { return (a + b) % n; });
  g.is_simple = is_prime(n);
  return g;
}

FiniteGroup dihedral_group(std::size_t m) {
  if (m < 3) throw InvalidArgument("dihedral group needs m >= 3");
  // r^k s^e has index k + m e
  return from_rule(2 * m, "D" + std::to_string(2 * m), [m](std::size_t x, std::size_t y) {
    const std::size_t k = x % m, e = x / m, l = y % m, f = y / m;
    const std::size_t r = e == 0 ? (k + l) % m : (k + m - l) % m;
    return r + m * ((e + f) % 2);
  });
}

FiniteGroup dicyclic_group(std::size_t m) {
  if (m < 2) throw InvalidArgument("dicyclic group needs m >= 2");
  const std::size_t n = 2 * m;
  // a^k x^e has index k + n e
  return from_rule(4 * m, m == 2 ? "Q8" : "Dic" + std::to_string(m), [m, n](std::size_t u, std::size_t v) {
    const std::size_t k = u % n, e = u / n, l = v % n, f = v / n;
    if (e == 0) return (k + l) % n + n * f;
    if (f == 0) return (k + n - l) % n + n;
    return (k + n - l + m) % n;
  });
}

FiniteGroup quaternion8() { return dicyclic_group(2); }

FiniteGroup symmetric_group(std::size_t n) {
  if (n < 1 || n > 5) throw InvalidArgument("symmetric group supported for 1 <= n <= 5");
  auto g = permutation_group(n, false, "S" + std::to_string(n));
  g.is_simple = n == 2;
  return g;
}

FiniteGroup alternating_group(std::size_t n) {
  if (n < 1 || n > 5) throw InvalidArgument("alternating group supported for 1 <= n <= 5");
  auto g = permutation_group(n, true, "A" + std::to_string(n));
  g.is_simple = n == 3 || n == 5;
  return g;
}

FiniteGroup direct_product(const FiniteGroup& g, const FiniteGroup& h) {
  const std::size_t m = h.order;
  return from_rule(g.order * m, g.name + "x" + h.name, [&](std::size_t a, std::size_t b) {
    return static_cast<std::size_t>(g.op(static_cast<int>(a / m), static_cast<int>(b / m))) * m +
           static_cast<std::size_t>(h.op(static_cast<int>(a % m), static_cast<int>(b % m)));
  });
}

FiniteGroup build_group(const std::string& name) {
  const auto factors = split(name, 'x');
  if (factors.size() > 1) {
    FiniteGroup g = build_group(factors[0]);
    for (std::size_t i = 1; i < factors.size(); ++i) g = direct_product(g, build_group(factors[i]));
    return g;
  }
  auto number = [&](std::size_t skip) -> std::size_t {
    const auto digits = name.substr(skip);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 6) {
      throw InvalidArgument("unsupported group '" + name + "'");
    }
    return std::stoul(digits);
  };
  if (name == "Q8") return quaternion8();
  if (name.rfind("Dic", 0) == 0) return dicyclic_group(number(3));
  if (name.empty()) throw InvalidArgument("empty group name");
  switch (name[0]) {
    case 'C': return cyclic_group(number(1));
    case 'D': {
      const std::size_t n = number(1);
      if (n % 2 != 0) throw InvalidArgument("dihedral order must be even: '" + name + "'");
      return dihedral_group(n / 2);
    }
    case 'S': return symmetric_group(number(1));
    case 'A': return alternating_group(number(1));
    default: throw InvalidArgument("unsupported group '" + name + "'");
  }
}

void check_group_axioms(const FiniteGroup& g) {
  const std::size_t n = g.order;
  const std::string who = "group " + g.name + ": ";
  if (g.table.size() != n * n) throw InvalidArgument(who + "table size is not n^2");
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<char> row(n, 0), col(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const int r = g.table[i * n + j], c = g.table[j * n + i];
      if (r < 0 || c < 0 || static_cast<std::size_t>(r) >= n || static_cast<std::size_t>(c) >= n ||
          row[static_cast<std::size_t>(r)]++ || col[static_cast<std::size_t>(c)]++) {
        throw InvalidArgument(who + "not a Latin square at line " + std::to_string(i));
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (g.op(0, static_cast<int>(a)) != static_cast<int>(a) || g.op(static_cast<int>(a), 0) != static_cast<int>(a)) {
      throw InvalidArgument(who + "element 0 is not the identity");
    }
  }
  const auto inv = inverses(g);
  for (std::size_t a = 0; a < n; ++a) {
    if (inv[a] < 0 || g.op(inv[a], static_cast<int>(a)) != 0) {
      throw InvalidArgument(who + "element " + std::to_string(a) + " has no two-sided inverse");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const int ab = g.table[a * n + b];
      for (std::size_t c = 0; c < n; ++c) {
        if (g.op(ab, static_cast<int>(c)) != g.op(static_cast<int>(a), g.table[b * n + c])) {
          throw InvalidArgument(who + "not associative at (" + std::to_string(a) + "," + std::to_string(b) +
                                "," + std::to_string(c) + ")");
        }
      }
    }
  }
}

bool brute_force_is_simple(const FiniteGroup& g) {
  if (g.order < 2) return false;
  const auto inv = inverses(g);
  for (std::size_t x = 1; x < g.order; ++x) {
    std::set<int> cls;
    for (std::size_t y = 0; y < g.order; ++y) {
      cls.insert(g.op(g.op(static_cast<int>(y), static_cast<int>(x)), inv[y]));
    }
    if (count(generated(g, std::vector<int>(cls.begin(), cls.end()))) != g.order) return false;
  }
  return true;
}

std::string group_fingerprint(const FiniteGroup& g) {
  const std::size_t n = g.order;
  const auto inv = inverses(g);
  std::vector<std::pair<std::size_t, std::size_t>> per_element;
  std::size_t center = 0;
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t ord = 1;
    for (int y = static_cast<int>(x); y != 0; y = g.op(y, static_cast<int>(x))) ++ord;
    if (x == 0) ord = 1;
    std::size_t centralizer = 0;
    for (std::size_t y = 0; y < n; ++y) {
      centralizer += g.op(static_cast<int>(x), static_cast<int>(y)) == g.op(static_cast<int>(y), static_cast<int>(x));
    }
    center += centralizer == n;
    per_element.emplace_back(ord, centralizer);
  }
  std::sort(per_element.begin(), per_element.end());
  std::set<int> commutators;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      commutators.insert(g.op(g.op(inv[x], inv[y]), g.op(static_cast<int>(x), static_cast<int>(y))));
    }
  }
  const std::size_t derived = count(generated(g, std::vector<int>(commutators.begin(), commutators.end())));
  std::ostringstream out;
  out << n << '|' << center << '|' << derived;
  for (const auto& [o, c] : per_element) out << '|' << o << ',' << c;
  return out.str();
}

std::vector<FiniteGroup> group_catalog(std::size_t max_order) {
  if (max_order < 2) throw InvalidArgument("catalog needs max_order >= 2");
  std::vector<FiniteGroup> out;
  std::set<std::string> seen;
  auto offer = [&](FiniteGroup g) {
    if (g.order > max_order) return;
    if (seen.insert(group_fingerprint(g)).second) out.push_back(std::move(g));
  };
  for (std::size_t n = 2; n <= max_order; ++n) offer(cyclic_group(n));
  for (std::size_t m = 3; 2 * m <= max_order; ++m) offer(dihedral_group(m));
  for (std::size_t m = 2; 4 * m <= max_order; ++m) offer(dicyclic_group(m));
  offer(alternating_group(4));
  offer(symmetric_group(4));
  offer(alternating_group(5));
  // Direct products of catalog members until no new group appears.
  for (std::size_t done = 0; done < out.size();) {
    const std::size_t end = out.size();
    for (std::size_t i = 0; i < end; ++i) {
      for (std::size_t j = std::max(i, done); j < end; ++j) {
        if (out[i].order * out[j].order <= max_order) offer(direct_product(out[j], out[i]));
      }
    }
    done = end;
  }
  std::sort(out.begin(), out.end(), [](const FiniteGroup& a, const FiniteGroup& b) {
    return a.order != b.order ? a.order < b.order : a.name < b.name;
  });
  return out;
}

void write_catalog_csv(const std::vector<FiniteGroup>& groups, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& g : groups) {
    out << "# group=" << g.name << " order=" << g.order << " simple=" << (g.is_simple ? 1 : 0) << '\n';
    for (std::size_t a = 0; a < g.order; ++a) {
      for (std::size_t b = 0; b < g.order; ++b) out << (b ? "," : "") << g.table[a * g.order + b] + 1;
      out << '\n';
    }
  }
  write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------- Latin squares

LatinSquare cayley_square(const FiniteGroup& g) {
  LatinSquare sq;
  sq.order = g.order;
  sq.table.resize(g.table.size());
  for (std::size_t i = 0; i < g.table.size(); ++i) sq.table[i] = g.table[i] + 1;
  sq.is_group = true;
  return sq;
}

bool is_latin(const LatinSquare& sq) {
  const std::size_t n = sq.order;
  if (n == 0 || sq.table.size() != n * n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<char> row(n + 1, 0), col(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const int r = sq.at(i, j), c = sq.at(j, i);
      if (r < 1 || c < 1 || r > static_cast<int>(n) || c > static_cast<int>(n)) return false;
      if (row[static_cast<std::size_t>(r)]++ || col[static_cast<std::size_t>(c)]++) return false;
    }
  }
  return true;
}

bool is_group_table(const LatinSquare& sq) {
  if (!is_latin(sq)) throw InvalidArgument("not a Latin square");
  const std::size_t n = sq.order;
  // Loop x o y = L(row_of(x), col_of(y)) where row_of(x) is the row whose first
  // entry is x and col_of(y) the column whose first-row entry is y.
  std::vector<std::size_t> row_of(n + 1), col_of(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    row_of[static_cast<std::size_t>(sq.at(i, 0))] = i;
    col_of[static_cast<std::size_t>(sq.at(0, i))] = i;
  }
  std::vector<int> loop(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) loop[x * n + y] = sq.at(row_of[x + 1], col_of[y + 1]) - 1;
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto ab = static_cast<std::size_t>(loop[a * n + b]);
      for (std::size_t c = 0; c < n; ++c) {
        if (loop[ab * n + c] != loop[a * n + static_cast<std::size_t>(loop[b * n + c])]) return false;
      }
    }
  }
  return true;
}

LatinSquare gen_latin_square(std::size_t n, RngSeed seed) {
  if (n < 2) throw InvalidArgument("Latin square order must be at least 2");
  Rng rng(seed);
  // Incidence cube: cube(r, c, s) = 1 iff symbol s sits at (r, c). An improper
  // cube has exactly one -1 entry.
  std::vector<int> cube(n * n * n, 0);
  auto at = [&](std::size_t r, std::size_t c, std::size_t s) -> int& { return cube[(r * n + c) * n + s]; };
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) at(r, c, (r + c) % n) = 1;
  }
  // Two positive cells on a line through an improper cell; picks one at random.
  auto pick = [&](auto&& value) {
    std::size_t found[2] = {0, 0};
    std::size_t k = 0;
    for (std::size_t i = 0; i < n && k < 2; ++i) {
      if (value(i) == 1) found[k++] = i;
    }
    return k == 1 ? found[0] : found[rng.below(2)];
  };
  bool proper = true;
  std::array<std::size_t, 3> bad{};
  const std::size_t moves = 10 * n * n * n;
  for (std::size_t step = 0; step < moves || !proper; ++step) {
    std::size_t r, c, s, r2, c2, s2;
    if (proper) {
      do {
        r = rng.below(n);
        c = rng.below(n);
        s = rng.below(n);
      } while (at(r, c, s) != 0);
      r2 = pick([&](std::size_t i) { return at(i, c, s); });
      c2 = pick([&](std::size_t i) { return at(r, i, s); });
      s2 = pick([&](std::size_t i) { return at(r, c, i); });
    } else {
      std::tie(r, c, s) = std::tuple(bad[0], bad[1], bad[2]);
      r2 = pick([&](std::size_t i) { return at(i, c, s); });
      c2 = pick([&](std::size_t i) { return at(r, i, s); });
      s2 = pick([&](std::size_t i) { return at(r, c, i); });
    }
    ++at(r, c, s);
    ++at(r, c2, s2);
    ++at(r2, c, s2);
    ++at(r2, c2, s);
    --at(r, c, s2);
    --at(r, c2, s);
    --at(r2, c, s);
    --at(r2, c2, s2);
    proper = at(r2, c2, s2) != -1;
    if (!proper) bad = {r2, c2, s2};
  }
  LatinSquare sq;
  sq.order = n;
  sq.table.resize(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t s = 0; s < n; ++s) {
        if (at(r, c, s) == 1) sq.table[r * n + c] = static_cast<int>(s) + 1;
      }
    }
  }
  sq.is_group = is_group_table(sq);
  return sq;
}

namespace {

std::vector<double> permuted_table(const std::vector<int>& table, std::size_t n, Rng& rng) {
  std::vector<double> m(table.begin(), table.end());
  const auto rows = rng.permutation(n);
  const auto cols = rng.permutation(n);
  return permute_matrix(m, n, n, rows, cols);
}

}  // namespace

LabeledDataset gen_group_vs_latin_task(std::size_t per_class, RngSeed seed) {
  if (per_class < 1) throw InvalidArgument("per_class must be positive");
  constexpr std::size_t n = 12;
  const std::vector<FiniteGroup> groups = {build_group("C12"), build_group("C6xC2"), build_group("D12"),
                                           build_group("A4"), build_group("Dic3")};
  LabeledDataset ds(FeatureShape::matrix(n, n), 2, "group-latin", FeatureKind::integer);
  ds.reserve(2 * per_class);
  Rng rng(derive(seed, "group-tables"));
  for (std::size_t i = 0; i < per_class; ++i) {
    const auto& g = groups[i % groups.size()];
    std::vector<int> t(g.table.begin(), g.table.end());
    for (auto& v : t) ++v;
    ds.add(permuted_table(t, n, rng), 1);
  }
  const RngSeed squares = derive(seed, "latin-squares");
  Rng perm(derive(seed, "latin-permutations"));
  std::size_t rejected = 0;
  for (std::size_t i = 0, draw = 0; i < per_class; ++draw) {
    auto sq = gen_latin_square(n, derive(squares, draw));
    if (sq.is_group) {
      ++rejected;
      continue;
    }
    ds.add(permuted_table(sq.table, n, perm), 0);
    ++i;
  }
  Rng order(derive(seed, "order"));
  auto out = ds.subset(order.permutation(ds.size()));
  out.label_names = {"latin", "group"};
  out.metadata["groups"] = "C12,C6xC2,D12,A4,Dic3";
  out.metadata["group_isotopes_rejected"] = std::to_string(rejected);
  return out;
}

LabeledDataset gen_simple_group_task(const std::vector<FiniteGroup>& groups, std::size_t per_class,
                                     std::size_t pad, RngSeed seed) {
  if (per_class < 1) throw InvalidArgument("per_class must be positive");
  std::vector<const FiniteGroup*> by_class[2];
  for (const auto& g : groups) {
    if (g.order > pad) throw InvalidArgument("group " + g.name + " does not fit in " + std::to_string(pad));
    by_class[g.is_simple ? 1 : 0].push_back(&g);
  }
  if (by_class[0].empty() || by_class[1].empty()) throw InvalidArgument("catalog lacks one of the classes");
  LabeledDataset ds(FeatureShape::matrix(pad, pad), 2, "simple-groups", FeatureKind::integer);
  ds.reserve(2 * per_class);
  std::vector<double> padded(pad * pad);
  for (int label = 0; label < 2; ++label) {
    Rng rng(derive(seed, label == 1 ? "simple" : "non-simple"));
    const auto& members = by_class[label];
    for (std::size_t i = 0; i < per_class; ++i) {
      const auto& g = *members[i % members.size()];
      std::vector<int> t(g.table.begin(), g.table.end());
      for (auto& v : t) ++v;
      const auto m = permuted_table(t, g.order, rng);
      std::fill(padded.begin(), padded.end(), 0.0);
      for (std::size_t r = 0; r < g.order; ++r) {
        std::copy_n(m.begin() + static_cast<std::ptrdiff_t>(r * g.order), g.order,
                    padded.begin() + static_cast<std::ptrdiff_t>(r * pad));
      }
      ds.add(padded, label);
    }
  }
  Rng order(derive(seed, "order"));
  auto out = ds.subset(order.permutation(ds.size()));
  out.label_names = {"non-simple", "simple"};
  out.metadata["simple_groups"] = std::to_string(by_class[1].size());
  out.metadata["non_simple_groups"] = std::to_string(by_class[0].size());
  return out;
}

LabeledDataset gen_simple_group_task(std::size_t max_order, std::size_t per_class, RngSeed seed) {
  auto out = gen_simple_group_task(group_catalog(max_order), per_class, max_order, seed);
  out.metadata["max_order"] = std::to_string(max_order);
  return out;
}

LabeledDataset group_table_examples(const std::vector<FiniteGroup>& groups, std::size_t copies,
                                    std::size_t pad, RngSeed seed) {
  if (copies < 1) throw InvalidArgument("copies must be positive");
  LabeledDataset ds(FeatureShape::matrix(pad, pad), 2, "simple-groups", FeatureKind::integer);
  Rng rng(derive(seed, "held-out"));
  std::vector<double> padded(pad * pad);
  for (const auto& g : groups) {
    if (g.order > pad) throw InvalidArgument("group " + g.name + " does not fit in " + std::to_string(pad));
    std::vector<int> t(g.table.begin(), g.table.end());
    for (auto& v : t) ++v;
    for (std::size_t k = 0; k < copies; ++k) {
      const auto m = permuted_table(t, g.order, rng);
      std::fill(padded.begin(), padded.end(), 0.0);
      for (std::size_t r = 0; r < g.order; ++r) {
        std::copy_n(m.begin() + static_cast<std::ptrdiff_t>(r * g.order), g.order,
                    padded.begin() + static_cast<std::ptrdiff_t>(r * pad));
      }
      ds.add(padded, g.is_simple ? 1 : 0);
    }
  }
  ds.label_names = {"non-simple", "simple"};
  return ds;
}

// ---------------------------------------------------------------- SU(3)

namespace {

void check_weight(Su3Irrep r) {
  if (r.a < 0 || r.b < 0 || r.a > kSu3MaxWeight || r.b > kSu3MaxWeight) {
    throw InvalidArgument("SU(3) weight [" + std::to_string(r.a) + "," + std::to_string(r.b) +
                          "] outside [0, " + std::to_string(kSu3MaxWeight) + "]");
  }
}

using Character = std::map<std::pair<int, int>, long>;

// Weights of [a, b] from Gelfand-Tsetlin patterns with top row (a+b, b, 0).
Character character(Su3Irrep r) {
  Character ch;
  const int l1 = r.a + r.b, l2 = r.b;
  for (int m1 = l2; m1 <= l1; ++m1) {
    for (int m2 = 0; m2 <= l2; ++m2) {
      for (int k = m2; k <= m1; ++k) {
        const int s2 = m1 + m2, s3 = l1 + l2;
        ++ch[{2 * k - s2, 2 * s2 - k - s3}];
      }
    }
  }
  return ch;
}

std::vector<Su3Irrep> lr_decompose(Su3Irrep r1, Su3Irrep r2) {
  // Young diagrams lambda = (a1+b1, b1), mu = (a2+b2, b2). Add mu1 boxes
  // labelled 1 then mu2 boxes labelled 2, each as a horizontal strip, keeping
  // the reverse reading word a lattice word. Shapes with a fourth row vanish.
  const int l1 = r1.a + r1.b, l2 = r1.b;
  const int m1 = r2.a + r2.b, m2 = r2.b;
  std::vector<Su3Irrep> out;
  for (int x2 = 0; x2 <= m1; ++x2) {
    for (int x3 = 0; x2 + x3 <= m1; ++x3) {
      const int x1 = m1 - x2 - x3;
      const int n1 = l1 + x1, n2 = l2 + x2, n3 = x3;
      if (n2 > l1 || n3 > l2) continue;
      for (int y2 = 0; y2 <= m2; ++y2) {
        const int y3 = m2 - y2;
        if (n2 + y2 > n1 || n3 + y3 > n2) continue;
        if (y2 > x1 || y2 + y3 > x1 + x2) continue;
        const int v1 = n1, v2 = n2 + y2, v3 = n3 + y3;
        out.push_back({v1 - v2, v2 - v3});
      }
    }
  }
  return out;
}

std::vector<Su3Irrep> character_decompose(Su3Irrep r1, Su3Irrep r2) {
  const auto c1 = character(r1), c2 = character(r2);
  Character product;
  for (const auto& [w1, k1] : c1) {
    for (const auto& [w2, k2] : c2) product[{w1.first + w2.first, w1.second + w2.second}] += k1 * k2;
  }
  std::vector<Su3Irrep> out;
  for (;;) {
    // The weight maximizing h1 + h2 is a highest weight of a summand.
    const std::pair<int, int>* top = nullptr;
    for (const auto& [w, k] : product) {
      if (k != 0 && (!top || w.first + w.second > top->first + top->second)) top = &w;
    }
    if (!top) break;
    const Su3Irrep hw{top->first, top->second};
    if (hw.a < 0 || hw.b < 0) throw Error("character subtraction reached a non-dominant weight");
    out.push_back(hw);
    for (const auto& [w, k] : character(hw)) product[w] -= k;
  }
  return out;
}

}  // namespace

std::vector<Su3Irrep> su3_decompose(Su3Irrep r1, Su3Irrep r2) {
  check_weight(r1);
  check_weight(r2);
  auto out = lr_decompose(r1, r2);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Su3Irrep> su3_decompose_bruteforce(Su3Irrep r1, Su3Irrep r2) {
  check_weight(r1);
  check_weight(r2);
  auto out = character_decompose(r1, r2);
  std::sort(out.begin(), out.end());
  return out;
}

long su3_dimension(Su3Irrep r) { return static_cast<long>(r.a + 1) * (r.b + 1) * (r.a + r.b + 2) / 2; }

int su3_tensor_terms(Su3Irrep r1, Su3Irrep r2) { return static_cast<int>(su3_decompose(r1, r2).size()); }

LabeledDataset gen_su3_task(int max_label, RngSeed seed, int max_weight) {
  if (max_label < 2) throw InvalidArgument("max_label must be at least 2");
  if (max_weight < 0 || max_weight > kSu3MaxWeight) {
    throw InvalidArgument("max_weight must lie in [0, " + std::to_string(kSu3MaxWeight) + "]");
  }
  LabeledDataset ds(FeatureShape::flat(4), max_label, "su3-terms", FeatureKind::integer);
  for (int a1 = 0; a1 <= max_weight; ++a1) {
    for (int b1 = 0; b1 <= max_weight; ++b1) {
      for (int a2 = 0; a2 <= max_weight; ++a2) {
        for (int b2 = 0; b2 <= max_weight; ++b2) {
          const int terms = su3_tensor_terms({a1, b1}, {a2, b2});
          ds.add(std::vector<double>{double(a1), double(b1), double(a2), double(b2)},
                 std::min(terms, max_label) - 1);
        }
      }
    }
  }
  Rng order(derive(seed, "su3"));
  auto out = ds.subset(order.permutation(ds.size()));
  for (int k = 1; k < max_label; ++k) out.label_names.push_back(std::to_string(k));
  out.label_names.push_back(">=" + std::to_string(max_label));
  out.metadata["max_weight"] = std::to_string(max_weight);
  return out;
}

}  // namespace mlmath
