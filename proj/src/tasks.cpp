#include <algorithm>
#include <sstream>

#include "mlmath/algebra.hpp"
#include "mlmath/arith.hpp"
#include "mlmath/geometry.hpp"
#include "mlmath/graphs.hpp"
#include "mlmath/harness.hpp"
#include "mlmath/io.hpp"

namespace mlmath {

namespace {

long long int_param(const ParamMap& p, const std::string& key) { return std::get<long long>(p.at(key)); }

std::size_t count_param(const ParamMap& p, const std::string& key) {
  const long long v = int_param(p, key);
  if (v < 0) throw InvalidArgument("task." + key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

const std::string& str_param(const ParamMap& p, const std::string& key) { return std::get<std::string>(p.at(key)); }

// An empty path selects the shipped sample.
std::filesystem::path data_path(const ParamMap& p, const std::string& key, const std::string& sample,
                                const std::filesystem::path& base_dir) {
  const std::string& given = str_param(p, key);
  if (given.empty() || given == "sample") return std::filesystem::path(MLMATH_DATA_DIR) / sample;
  std::filesystem::path path(given);
  if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
  return path;
}

std::vector<std::uint64_t> parse_moduli(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    for (auto field : split(tok, ',')) {
      if (trim(field).empty()) continue;
      const auto v = parse_int(trim(field), "task.p_set");
      if (v < 2) throw InvalidArgument("task.p_set entries must be >= 2");
      out.push_back(static_cast<std::uint64_t>(v));
    }
  }
  return out;
}

WindowSpec window_spec(const ParamMap& p) {
  WindowSpec s;
  s.window = count_param(p, "window");
  s.offset = count_param(p, "offset");
  s.i_min = count_param(p, "i_min");
  s.i_max = count_param(p, "i_max");
  s.per_class = count_param(p, "per_class");
  return s;
}

ModpParams modp_params(const ParamMap& p) {
  ModpParams m;
  const long long lo = int_param(p, "n_min"), hi = int_param(p, "n_max"), base = int_param(p, "base");
  if (lo < 0 || hi < 0) throw InvalidArgument("task.n_min and task.n_max must be non-negative");
  if (base < 2 || base > 36) throw InvalidArgument("task.base must lie in [2, 36]");
  m.n_min = static_cast<std::uint64_t>(lo);
  m.n_max = static_cast<std::uint64_t>(hi);
  m.base = static_cast<unsigned>(base);
  m.count = count_param(p, "count");
  return m;
}

std::vector<ParamSpec> window_params() {
  return {{"window", ValueType::integer, 100LL, "window width w (features are w+1 values)"},
          {"offset", ValueType::integer, 10000LL, "distance k from the window end to the label"},
          {"i_min", ValueType::integer, 1LL, "first window start"},
          {"i_max", ValueType::integer, 50000LL, "last window start"},
          {"per_class", ValueType::integer, 9000LL, "examples per class after down-sampling (0 keeps all)"}};
}

std::vector<ParamSpec> modp_params_spec() {
  return {{"n_min", ValueType::integer, 1LL, "smallest n"},
          {"n_max", ValueType::integer, 65535LL, "largest n"},
          {"base", ValueType::integer, 2LL, "digit base"},
          {"count", ValueType::integer, 20000LL, "examples before balancing"}};
}

std::vector<TaskInfo> build_registry() {
  std::vector<TaskInfo> r;
  r.push_back({"quadratic-multiplicity", "algebraic-geometry",
               "complex quadratic a z^2 + b z + c -> one or two distinct roots",
               {{"count", ValueType::integer, 1000000LL, "uniform coefficient draws"},
                {"bound", ValueType::integer, 10LL, "bound on real and imaginary parts"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_quadratic_multiplicity(count_param(p, "count"), int_param(p, "bound"), s);
               }});
  r.push_back({"quadratic-real-roots", "algebraic-geometry", "real quadratic -> number of distinct real roots",
               {{"count", ValueType::integer, 100000LL, "uniform coefficient draws"},
                {"bound", ValueType::integer, 10LL, "coefficient bound"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_quadratic_real_roots(count_param(p, "count"), int_param(p, "bound"), s);
               }});
  r.push_back({"parity", "numerical-analysis", "samples of an even or odd function at x and -x",
               {{"count", ValueType::integer, 100000LL, "examples (half per class)"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_parity_functions(count_param(p, "count"), s);
               }});
  r.push_back({"cicy-hodge", "algebraic-geometry", "CICY configuration matrix -> h11",
               {{"path", ValueType::string, std::string("sample"), "configuration list (\"sample\" = shipped 50 records)"},
                {"copies", ValueType::integer, 20LL, "permuted copies per configuration"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path& base) {
                 const auto configs = load_cicy(data_path(p, "path", "cicy_sample.txt", base));
                 auto ds = gen_cicy_hodge_task(configs, count_param(p, "copies"), s);
                 if (auto w = cicy_count_warning(configs.size())) ds.metadata["warning"] = *w;
                 return ds;
               }});
  r.push_back({"group-vs-latin", "algebra", "order-12 group table (permuted) vs random Latin square",
               {{"per_class", ValueType::integer, 5000LL, "examples per class"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_group_vs_latin_task(count_param(p, "per_class"), s);
               }});
  r.push_back({"simple-groups", "algebra", "Cayley table -> simple or not",
               {{"max_order", ValueType::integer, 70LL, "largest group order (and padding)"},
                {"per_class", ValueType::integer, 5000LL, "examples per class"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_simple_group_task(count_param(p, "max_order"), count_param(p, "per_class"), s);
               }});
  r.push_back({"su3-terms", "algebra", "pair of SU(3) irreps -> number of terms in the tensor product",
               {{"max_label", ValueType::integer, 10LL, "term counts at or above this share a class"},
                {"max_weight", ValueType::integer, static_cast<long long>(kSu3MaxWeight), "largest Dynkin label"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_su3_task(static_cast<int>(int_param(p, "max_label")), s,
                                     static_cast<int>(int_param(p, "max_weight")));
               }});
  r.push_back({"graph", "combinatorics", "adjacency matrix -> acyclic | girth3way | planar | euler | hamilton",
               {{"property", ValueType::string, std::string("acyclic"), "graph property"},
                {"per_class", ValueType::integer, 1000LL, "examples per class"},
                {"min_vertices", ValueType::integer, 6LL, "smallest graph"},
                {"max_vertices", ValueType::integer, 12LL, "largest graph (and padding)"},
                {"copies", ValueType::integer, 0LL, "relabelled copies per sampled graph"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 GraphTaskParams g;
                 g.property = graph_property_from_string(str_param(p, "property"));
                 g.per_class = count_param(p, "per_class");
                 g.min_vertices = count_param(p, "min_vertices");
                 g.max_vertices = count_param(p, "max_vertices");
                 g.copies = count_param(p, "copies");
                 return gen_graph_property_task(g, s);
               }});
  r.push_back({"prime-window", "analytic-number-theory", "window of prime indicators on odd numbers -> later prime",
               window_params(), [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_prime_window_task(window_spec(p), s);
               }});
  r.push_back({"liouville-window", "analytic-number-theory", "window of Liouville signs -> later sign",
               window_params(), [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_liouville_task(window_spec(p), s);
               }});
  auto fixed = modp_params_spec();
  fixed.insert(fixed.begin(), {"p", ValueType::integer, 2LL, "modulus"});
  r.push_back({"modp-fixed", "number-theory", "digits of n -> n mod p", fixed,
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 const long long m = int_param(p, "p");
                 if (m < 2) throw InvalidArgument("task.p must be >= 2");
                 return gen_modp_fixed_task(static_cast<std::uint64_t>(m), modp_params(p), s);
               }});
  auto variable = modp_params_spec();
  variable.insert(variable.begin(),
                  {"p_set", ValueType::string, std::string("3 5 7 11 13 17 19 23 29 31"), "moduli"});
  r.push_back({"modp-variable", "number-theory", "digits of (n, p) -> p divides n", variable,
               [](const ParamMap& p, RngSeed s, const std::filesystem::path&) {
                 return gen_modp_variable_task(parse_moduli(str_param(p, "p_set")), modp_params(p), s);
               }});
  r.push_back({"curves", "arithmetic-geometry", "a_p vector of an elliptic curve -> rank | torsion | integer_points",
               {{"path", ValueType::string, std::string("sample"), "label CSV (\"sample\" = shipped 200 curves)"},
                {"property", ValueType::string, std::string("torsion"), "label column"},
                {"n_primes", ValueType::integer, 100LL, "good primes per vector"},
                {"balance", ValueType::boolean, true, "down-sample to the smallest class"}},
               [](const ParamMap& p, RngSeed s, const std::filesystem::path& base) {
                 const auto curves = load_curve_labels(data_path(p, "path", "curves_sample.csv", base));
                 return gen_curve_task(curves, curve_property_from_string(str_param(p, "property")),
                                       count_param(p, "n_primes"), std::get<bool>(p.at("balance")), s);
               }});
  return r;
}

bool type_matches(ValueType t, const ConfigValue& v) {
  switch (t) {
    case ValueType::boolean: return std::holds_alternative<bool>(v);
    case ValueType::integer: return std::holds_alternative<long long>(v);
    case ValueType::decimal: return std::holds_alternative<double>(v) || std::holds_alternative<long long>(v);
    case ValueType::string: return std::holds_alternative<std::string>(v);
  }
  return false;
}

}  // namespace

const std::vector<TaskInfo>& task_registry() {
  static const std::vector<TaskInfo> registry = build_registry();
  return registry;
}

const TaskInfo* find_task(std::string_view id) {
  for (const auto& t : task_registry()) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

ParamMap resolve_task_params(const TaskInfo& task, const ParamMap& given) {
  std::vector<std::string> problems;
  ParamMap out;
  for (const auto& spec : task.params) out[spec.name] = spec.fallback;
  for (const auto& [key, value] : given) {
    auto it = std::find_if(task.params.begin(), task.params.end(), [&](const ParamSpec& s) { return s.name == key; });
    if (it == task.params.end()) {
      problems.push_back("unknown parameter task." + key + " for task " + task.id);
      continue;
    }
    // Numeric-looking strings are still strings where a string is expected.
    ConfigValue v = value;
    if (it->type == ValueType::string && !std::holds_alternative<std::string>(v)) v = format_value(v);
    if (it->type == ValueType::decimal && std::holds_alternative<long long>(v)) {
      v = static_cast<double>(std::get<long long>(v));
    }
    if (!type_matches(it->type, v)) {
      problems.push_back("task." + key + " expects " + to_string(it->type) + ", got '" + format_value(value) + "'");
      continue;
    }
    out[key] = v;
  }
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw InvalidArgument(msg);
  }
  return out;
}

LabeledDataset generate_task(const std::string& id, const ParamMap& given, RngSeed seed,
                             const std::filesystem::path& base_dir) {
  const TaskInfo* task = find_task(id);
  if (!task) throw InvalidArgument("unknown task '" + id + "'");
  return task->generate(resolve_task_params(*task, given), seed, base_dir);
}

}  // namespace mlmath
