#include "mlmath/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "mlmath/io.hpp"

namespace mlmath {

using nlohmann::ordered_json;

std::string to_string(ValueType t) {
  switch (t) {
    case ValueType::boolean: return "boolean";
    case ValueType::integer: return "integer";
    case ValueType::decimal: return "decimal";
    case ValueType::string: return "string";
  }
  return "?";
}

ConfigValue parse_value(std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') return std::string(text.substr(1, text.size() - 2));
  if (text == "true") return true;
  if (text == "false") return false;
  long long i = 0;
  auto [pi, ei] = std::from_chars(text.data(), text.data() + text.size(), i);
  if (ei == std::errc() && pi == text.data() + text.size() && !text.empty()) return i;
  double d = 0;
  auto [pd, ed] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (ed == std::errc() && pd == text.data() + text.size() && !text.empty() && std::isfinite(d)) return d;
  return std::string(text);
}

std::string format_value(const ConfigValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          char buf[64];
          auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
          std::string s(buf, p);
          if (s.find_first_of(".eE") == std::string::npos) s += ".0";
          return s;
        } else {
          return std::to_string(x);
        }
      },
      v);
}

namespace {

ordered_json value_json(const ConfigValue& v) {
  return std::visit([](const auto& x) { return ordered_json(x); }, v);
}

std::string stage_message(const char* stage, const std::exception& e) { return std::string(stage) + ": " + e.what(); }

std::string protocol_name(ProtocolKind k) { return k == ProtocolKind::holdout ? "holdout" : "kfold"; }

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// Converts a config value to the JSON type of a default hyperparameter.
std::optional<ordered_json> coerce_hyper(const ordered_json& fallback, const ConfigValue& v) {
  if (fallback.is_string()) return ordered_json(format_value(v));
  if (fallback.is_boolean()) {
    if (auto b = std::get_if<bool>(&v)) return ordered_json(*b);
    return std::nullopt;
  }
  if (fallback.is_number_unsigned() || fallback.is_number_integer()) {
    if (auto i = std::get_if<long long>(&v); i && *i >= 0) return ordered_json(static_cast<std::uint64_t>(*i));
    return std::nullopt;
  }
  if (fallback.is_number_float()) {
    if (auto d = std::get_if<double>(&v)) return ordered_json(*d);
    if (auto i = std::get_if<long long>(&v)) return ordered_json(static_cast<double>(*i));
    return std::nullopt;
  }
  if (fallback.is_array()) {
    // "64 32" or "64,32"; a bare integer is a single entry
    if (auto i = std::get_if<long long>(&v); i && *i > 0) return ordered_json::array({static_cast<std::uint64_t>(*i)});
    const std::string s = format_value(v);
    ordered_json arr = ordered_json::array();
    std::string tok;
    std::istringstream in(s);
    while (in >> tok) {
      for (auto f : split(tok, ',')) {
        if (trim(f).empty()) continue;
        std::uint64_t x = 0;
        auto t = trim(f);
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
        if (ec != std::errc() || p != t.data() + t.size()) return std::nullopt;
        arr.push_back(x);
      }
    }
    if (arr.empty()) return std::nullopt;
    return arr;
  }
  return std::nullopt;
}

struct Entry {
  std::size_t line;
  std::string key;
  std::string raw;
  ConfigValue value;
};

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : InvalidArgument([&] {
        std::string msg = "invalid config:";
        for (const auto& i : issues) {
          msg += "\n  ";
          msg += i.line ? "line " + std::to_string(i.line) : std::string("missing");
          msg += " [" + i.key + "]: " + i.message;
        }
        return msg;
      }()),
      issues_(std::move(issues)) {}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<ConfigIssue> issues;
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    // strip comments outside double quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({no, std::string(t), "expected 'key = value'"});
      continue;
    }
    const std::string key(trim(t.substr(0, eq)));
    const auto raw = trim(t.substr(eq + 1));
    if (key.empty()) {
      issues.push_back({no, "", "empty key"});
      continue;
    }
    if (raw.empty()) {
      issues.push_back({no, key, "empty value"});
      continue;
    }
    if (auto it = entries.find(key); it != entries.end()) {
      issues.push_back({no, key, "duplicate key (first set on line " + std::to_string(it->second.line) + ")"});
      continue;
    }
    entries.emplace(key, Entry{no, key, std::string(raw), parse_value(raw)});
  }

  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  auto string_of = [&](const Entry& e) -> std::optional<std::string> {
    if (auto s = std::get_if<std::string>(&e.value)) return *s;
    issues.push_back({e.line, e.key, "expects a string, got '" + e.raw + "'"});
    return std::nullopt;
  };
  auto decimal_of = [&](const Entry& e) -> std::optional<double> {
    if (auto d = std::get_if<double>(&e.value)) return *d;
    if (auto i = std::get_if<long long>(&e.value)) return static_cast<double>(*i);
    issues.push_back({e.line, e.key, "expects a decimal, got '" + e.raw + "'"});
    return std::nullopt;
  };
  auto integer_of = [&](const Entry& e) -> std::optional<long long> {
    if (auto i = std::get_if<long long>(&e.value)) return *i;
    issues.push_back({e.line, e.key, "expects an integer, got '" + e.raw + "'"});
    return std::nullopt;
  };
  auto find = [&](const std::string& key) -> const Entry* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  for (const char* req : {"task", "learner", "protocol", "seed"}) {
    if (!find(req)) issues.push_back({0, req, "required key missing"});
  }

  // task and its parameters
  const TaskInfo* task = nullptr;
  if (const Entry* e = find("task")) {
    if (auto s = string_of(*e)) {
      task = find_task(*s);
      if (!task) issues.push_back({e->line, "task", "unknown task '" + *s + "'"});
    }
  }
  ParamMap given;
  // learner
  std::optional<LearnerKind> kind;
  if (const Entry* e = find("learner")) {
    if (auto s = string_of(*e)) {
      try {
        kind = learner_kind_from_string(*s);
      } catch (const Error&) {
        issues.push_back({e->line, "learner", "unknown learner kind '" + *s + "'"});
      }
    }
  }
  ordered_json learner_json;
  if (kind) learner_json = to_json(LearnerSpec::defaults(*kind));

  const std::set<std::string> plain = {"name",     "task",     "domain",          "learner",
                                       "protocol", "seed",     "output",          "protocol.fraction",
                                       "protocol.k", "accept.min_precision", "accept.max_precision",
                                       "accept.min_phi", "accept.max_phi", "accept.max_abs_phi"};
  for (const auto& [key, e] : entries) {
    if (key.rfind("task.", 0) == 0) {
      const std::string param = key.substr(5);
      if (!task) continue;
      try {
        resolve_task_params(*task, {{param, e.value}});
        given[param] = e.value;
      } catch (const InvalidArgument& ex) {
        issues.push_back({e.line, key, ex.what()});
      }
    } else if (key.rfind("learner.", 0) == 0) {
      if (!kind) continue;
      const std::string hyper = key.substr(8);
      auto& h = learner_json["hyperparameters"];
      if (!h.contains(hyper)) {
        issues.push_back({e.line, key, "unknown hyperparameter for learner " + to_string(*kind)});
        continue;
      }
      auto v = coerce_hyper(h[hyper], e.value);
      if (!v) {
        issues.push_back({e.line, key, "cannot use '" + e.raw + "' here"});
        continue;
      }
      h[hyper] = *v;
    } else if (!plain.count(key)) {
      issues.push_back({e.line, key, "unknown key"});
    }
  }

  if (task) {
    try {
      cfg.task_params = resolve_task_params(*task, given);
    } catch (const InvalidArgument&) {
      // already reported per key
    }
    cfg.task = task->id;
    cfg.domain = task->domain;
    cfg.name = task->id;
  }
  if (const Entry* e = find("name")) {
    if (auto s = string_of(*e)) cfg.name = *s;
  }
  if (const Entry* e = find("domain")) {
    if (auto s = string_of(*e)) cfg.domain = *s;
  }
  if (const Entry* e = find("output")) {
    if (auto s = string_of(*e)) {
      std::filesystem::path p(*s);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.output = p;
    }
  }
  if (const Entry* e = find("seed")) {
    if (auto i = integer_of(*e)) {
      if (*i < 0) {
        issues.push_back({e->line, "seed", "must be non-negative"});
      } else {
        cfg.seed = RngSeed{static_cast<std::uint64_t>(*i)};
      }
    }
  }
  if (const Entry* e = find("protocol")) {
    if (auto s = string_of(*e)) {
      if (*s == "holdout") {
        cfg.protocol.kind = ProtocolKind::holdout;
      } else if (*s == "kfold") {
        cfg.protocol.kind = ProtocolKind::kfold;
      } else {
        issues.push_back({e->line, "protocol", "expected holdout or kfold, got '" + *s + "'"});
      }
    }
  }
  if (const Entry* e = find("protocol.fraction")) {
    if (auto d = decimal_of(*e)) {
      if (!(*d > 0.0 && *d < 1.0)) issues.push_back({e->line, e->key, "must lie strictly between 0 and 1"});
      if (cfg.protocol.kind != ProtocolKind::holdout) issues.push_back({e->line, e->key, "applies to holdout only"});
      cfg.protocol.fraction = *d;
    }
  }
  if (const Entry* e = find("protocol.k")) {
    if (auto i = integer_of(*e)) {
      if (*i < 2) issues.push_back({e->line, e->key, "kfold needs k >= 2"});
      if (cfg.protocol.kind != ProtocolKind::kfold) issues.push_back({e->line, e->key, "applies to kfold only"});
      cfg.protocol.k = static_cast<std::size_t>(std::max(2LL, *i));
    }
  }
  auto bound = [&](const char* key, std::optional<double>& slot) {
    if (const Entry* e = find(key)) {
      if (auto d = decimal_of(*e)) slot = *d;
    }
  };
  bound("accept.min_precision", cfg.thresholds.min_precision);
  bound("accept.max_precision", cfg.thresholds.max_precision);
  bound("accept.min_phi", cfg.thresholds.min_phi);
  bound("accept.max_phi", cfg.thresholds.max_phi);
  bound("accept.max_abs_phi", cfg.thresholds.max_abs_phi);

  if (kind) {
    learner_json["seed"] = derive(cfg.seed, "learner").value;
    try {
      cfg.learner = learner_spec_from_json(learner_json);
      cfg.learner.validate();
    } catch (const std::exception& ex) {
      const Entry* e = find("learner");
      issues.push_back({e ? e->line : 0, "learner", ex.what()});
    }
  }

  if (!issues.empty()) {
    std::stable_sort(issues.begin(), issues.end(),
                     [](const ConfigIssue& a, const ConfigIssue& b) { return a.line < b.line; });
    throw ConfigError(std::move(issues));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw DataError(e.what());
  }
  try {
    return parse_config(text, path.parent_path());
  } catch (const ConfigError& e) {
    std::vector<ConfigIssue> issues = e.issues();
    for (auto& i : issues) i.message = path.filename().string() + ": " + i.message;
    throw ConfigError(std::move(issues));
  }
}

ordered_json to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["name"] = cfg.name;
  j["task"] = cfg.task;
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : cfg.task_params) params[k] = value_json(v);
  j["task_params"] = params;
  j["domain"] = cfg.domain;
  j["learner"] = to_json(cfg.learner);
  ordered_json p;
  p["kind"] = protocol_name(cfg.protocol.kind);
  if (cfg.protocol.kind == ProtocolKind::holdout) {
    p["fraction"] = cfg.protocol.fraction;
  } else {
    p["k"] = cfg.protocol.k;
  }
  j["protocol"] = p;
  j["seed"] = cfg.seed.value;
  ordered_json t = ordered_json::object();
  if (cfg.thresholds.min_precision) t["min_precision"] = *cfg.thresholds.min_precision;
  if (cfg.thresholds.max_precision) t["max_precision"] = *cfg.thresholds.max_precision;
  if (cfg.thresholds.min_phi) t["min_phi"] = *cfg.thresholds.min_phi;
  if (cfg.thresholds.max_phi) t["max_phi"] = *cfg.thresholds.max_phi;
  if (cfg.thresholds.max_abs_phi) t["max_abs_phi"] = *cfg.thresholds.max_abs_phi;
  j["accept"] = t;
  return j;
}

namespace {

ordered_json dataset_json(const LabeledDataset& ds) {
  ordered_json j;
  j["task_id"] = ds.task_id();
  j["size"] = ds.size();
  j["shape"] = ds.shape().to_string();
  j["feature_kind"] = to_string(ds.kind());
  j["label_arity"] = ds.label_arity();
  j["class_counts"] = ds.class_counts();
  j["label_names"] = ds.label_names;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : ds.metadata) meta[k] = v;
  j["provenance"] = meta;
  return j;
}

ordered_json pair_json(const AccuracyPair& a) { return {{"precision", a.precision}, {"phi", a.phi}}; }

AccuracyPair pair_from(const ordered_json& j) { return {j.at("precision").get<double>(), j.at("phi").get<double>()}; }

void check_thresholds(const Thresholds& t, ExperimentReport& r) {
  if (!t.any()) return;
  const auto& a = r.accuracy;
  if (t.min_precision && a.precision < *t.min_precision) {
    r.acceptance_failures.push_back("precision " + fmt(a.precision) + " < " + fmt(*t.min_precision));
  }
  if (t.max_precision && a.precision > *t.max_precision) {
    r.acceptance_failures.push_back("precision " + fmt(a.precision) + " > " + fmt(*t.max_precision));
  }
  if (t.min_phi && a.phi < *t.min_phi) r.acceptance_failures.push_back("phi " + fmt(a.phi) + " < " + fmt(*t.min_phi));
  if (t.max_phi && a.phi > *t.max_phi) r.acceptance_failures.push_back("phi " + fmt(a.phi) + " > " + fmt(*t.max_phi));
  if (t.max_abs_phi && std::abs(a.phi) > *t.max_abs_phi) {
    r.acceptance_failures.push_back("|phi| " + fmt(std::abs(a.phi)) + " > " + fmt(*t.max_abs_phi));
  }
  r.accepted = r.acceptance_failures.empty();
}

template <typename F>
auto staged(const char* stage, F&& f) {
  try {
    return f();
  } catch (const DataError& e) {
    throw DataError(stage_message(stage, e));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(stage_message(stage, e));
  } catch (const Error& e) {
    throw Error(stage_message(stage, e));
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const TaskInfo* task = find_task(cfg.task);
  if (!task) throw InvalidArgument("unknown task '" + cfg.task + "'");
  ExperimentReport r;
  r.name = cfg.name;
  r.task = cfg.task;
  r.domain = cfg.domain;
  r.config = to_json(cfg);
  r.protocol = cfg.protocol.kind;

  const LabeledDataset ds = staged("generate", [&] {
    return task->generate(resolve_task_params(*task, cfg.task_params), derive(cfg.seed, "data"), cfg.base_dir);
  });
  r.dataset = dataset_json(ds);
  const int arity = ds.label_arity();
  const RngSeed split_seed = derive(cfg.seed, "split");

  if (cfg.protocol.kind == ProtocolKind::holdout) {
    const auto sp = staged("split", [&] { return split_train_val(ds, cfg.protocol.fraction, split_seed); });
    const auto model = staged("fit", [&] { return fit(cfg.learner, sp.train); });
    const auto pred = staged("predict", [&] { return model.predict_batch(sp.validation); });
    r.confusion = staged("score", [&] { return confusion_matrix(sp.validation.labels(), pred, arity); });
    r.accuracy = accuracy(r.confusion);
  } else {
    const auto folds = staged("split", [&] { return kfold(ds, cfg.protocol.k, split_seed); });
    ConfusionMatrix total(arity);
    std::vector<AccuracyPair> pairs;
    for (const auto& f : folds) {
      const auto model = staged("fit", [&] { return fit(cfg.learner, f.train); });
      const auto pred = staged("predict", [&] { return model.predict_batch(f.validation); });
      const auto cm = staged("score", [&] { return confusion_matrix(f.validation.labels(), pred, arity); });
      pairs.push_back(accuracy(cm));
      for (int a = 0; a < arity; ++a) {
        for (int b = 0; b < arity; ++b) {
          for (std::uint64_t c = 0; c < cm(a, b); ++c) total.increment(a, b);
        }
      }
    }
    r.cv = cross_val_aggregate(pairs);
    r.accuracy = {r.cv->mean_precision, r.cv->mean_phi};
    r.confusion = total;
  }
  check_thresholds(cfg.thresholds, r);
  r.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.output) staged("write", [&] { write_report(r, *cfg.output); return 0; });
  return r;
}

ordered_json to_json(const ExperimentReport& r) {
  ordered_json j;
  j["software_version"] = kSoftwareVersion;
  j["name"] = r.name;
  j["task"] = r.task;
  j["domain"] = r.domain;
  j["config"] = r.config;
  j["dataset"] = r.dataset;
  j["protocol"] = protocol_name(r.protocol);
  j["accuracy"] = pair_json(r.accuracy);
  if (r.cv) {
    ordered_json cv;
    ordered_json folds = ordered_json::array();
    for (const auto& p : r.cv->per_fold) folds.push_back(pair_json(p));
    cv["folds"] = folds;
    cv["mean_precision"] = r.cv->mean_precision;
    cv["std_precision"] = r.cv->std_precision;
    cv["mean_phi"] = r.cv->mean_phi;
    cv["std_phi"] = r.cv->std_phi;
    j["cross_validation"] = cv;
  }
  ordered_json cm = ordered_json::array();
  for (int a = 0; a < r.confusion.arity(); ++a) {
    ordered_json row = ordered_json::array();
    for (int b = 0; b < r.confusion.arity(); ++b) row.push_back(r.confusion(a, b));
    cm.push_back(row);
  }
  j["confusion_matrix"] = cm;
  if (r.accepted) {
    j["acceptance"] = {{"passed", *r.accepted}, {"failures", r.acceptance_failures}};
  }
  j["duration_seconds"] = r.duration_seconds;
  return j;
}

ExperimentReport report_from_json(const ordered_json& j) {
  try {
    ExperimentReport r;
    r.name = j.at("name").get<std::string>();
    r.task = j.at("task").get<std::string>();
    r.domain = j.at("domain").get<std::string>();
    r.config = j.at("config");
    r.dataset = j.at("dataset");
    r.protocol = j.at("protocol").get<std::string>() == "kfold" ? ProtocolKind::kfold : ProtocolKind::holdout;
    r.accuracy = pair_from(j.at("accuracy"));
    if (j.contains("cross_validation")) {
      const auto& cv = j.at("cross_validation");
      CvSummary s;
      for (const auto& f : cv.at("folds")) s.per_fold.push_back(pair_from(f));
      s.mean_precision = cv.at("mean_precision").get<double>();
      s.std_precision = cv.at("std_precision").get<double>();
      s.mean_phi = cv.at("mean_phi").get<double>();
      s.std_phi = cv.at("std_phi").get<double>();
      r.cv = s;
    }
    const auto& cm = j.at("confusion_matrix");
    const int n = static_cast<int>(cm.size());
    std::vector<std::uint64_t> counts;
    for (const auto& row : cm) {
      if (static_cast<int>(row.size()) != n) throw DataError("confusion matrix is not square");
      for (const auto& c : row) counts.push_back(c.get<std::uint64_t>());
    }
    r.confusion = ConfusionMatrix(n, counts);
    if (j.contains("acceptance")) {
      r.accepted = j.at("acceptance").at("passed").get<bool>();
      r.acceptance_failures = j.at("acceptance").at("failures").get<std::vector<std::string>>();
    }
    r.duration_seconds = j.at("duration_seconds").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::string report_text(const ExperimentReport& r) {
  std::ostringstream out;
  out << "experiment  " << r.name << "\n";
  out << "task        " << r.task << " (" << r.domain << ")\n";
  out << "learner     " << r.config.at("learner").at("kind").get<std::string>() << "\n";
  out << "dataset     " << r.dataset.at("size").get<std::size_t>() << " examples, shape "
      << r.dataset.at("shape").get<std::string>() << ", classes";
  for (auto c : r.dataset.at("class_counts")) out << ' ' << c.get<std::size_t>();
  out << "\n";
  out << "protocol    " << protocol_name(r.protocol);
  if (r.cv) out << " (" << r.cv->per_fold.size() << " folds)";
  out << "\n";
  out << "precision   " << fmt(r.accuracy.precision);
  if (r.cv) out << " +- " << fmt(r.cv->std_precision);
  out << "\nphi         " << fmt(r.accuracy.phi);
  if (r.cv) out << " +- " << fmt(r.cv->std_phi);
  out << "\nconfusion (rows actual, columns predicted)\n";
  for (int a = 0; a < r.confusion.arity(); ++a) {
    out << " ";
    for (int b = 0; b < r.confusion.arity(); ++b) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %7llu", static_cast<unsigned long long>(r.confusion(a, b)));
      out << buf;
    }
    out << "\n";
  }
  if (r.accepted) {
    out << "acceptance  " << (*r.accepted ? "PASS" : "FAIL");
    for (const auto& f : r.acceptance_failures) out << "; " << f;
    out << "\n";
  }
  out << "duration    " << fmt(r.duration_seconds, 1) << " s\n";
  return out.str();
}

void write_report(const ExperimentReport& r, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  auto json_path = stem;
  json_path += ".json";
  auto text_path = stem;
  text_path += ".txt";
  write_file_atomic(json_path, to_json(r).dump(2) + "\n");
  write_file_atomic(text_path, report_text(r));
}

ExperimentReport read_report(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw DataError(e.what());
  }
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  try {
    return report_from_json(j);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

HierarchyReport hierarchy_report(const std::vector<ExperimentReport>& reports) {
  if (reports.empty()) throw InvalidArgument("hierarchy needs at least one report");
  HierarchyReport h;
  for (const auto& r : reports) {
    h.tasks.push_back({r.domain, r.name, r.accuracy, r.dataset.value("size", std::size_t{0})});
  }
  auto by_phi = [](const HierarchyEntry& a, const HierarchyEntry& b) {
    if (a.accuracy.phi != b.accuracy.phi) return a.accuracy.phi > b.accuracy.phi;
    if (a.accuracy.precision != b.accuracy.precision) return a.accuracy.precision > b.accuracy.precision;
    return a.task < b.task;
  };
  std::stable_sort(h.tasks.begin(), h.tasks.end(), by_phi);
  std::set<std::string> seen;
  for (const auto& t : h.tasks) {
    if (seen.insert(t.domain).second) h.domains.push_back(t);  // first = best
  }
  if (h.domains.size() < 2) {
    throw InvalidArgument("hierarchy needs reports from at least two domains, got only '" + h.domains[0].domain + "'");
  }
  return h;
}

ordered_json to_json(const HierarchyReport& h) {
  auto list = [](const std::vector<HierarchyEntry>& v) {
    ordered_json arr = ordered_json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      arr.push_back({{"rank", i + 1},
                     {"domain", v[i].domain},
                     {"experiment", v[i].task},
                     {"precision", v[i].accuracy.precision},
                     {"phi", v[i].accuracy.phi},
                     {"size", v[i].size}});
    }
    return arr;
  };
  return {{"ranked_by", "phi, descending"}, {"domains", list(h.domains)}, {"experiments", list(h.tasks)}};
}

std::string hierarchy_text(const HierarchyReport& h) {
  std::ostringstream out;
  auto table = [&](const char* title, const std::vector<HierarchyEntry>& v) {
    out << title << "\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%4s  %-24s %-26s %9s %8s %8s\n", "rank", "domain", "experiment", "precision",
                  "phi", "size");
    out << buf;
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%4zu  %-24s %-26s %9.4f %8.4f %8zu\n", i + 1, v[i].domain.c_str(),
                    v[i].task.c_str(), v[i].accuracy.precision, v[i].accuracy.phi, v[i].size);
      out << buf;
    }
  };
  table("Domains by best phi (higher = more amenable to learning)", h.domains);
  out << "\n";
  table("Experiments by phi", h.tasks);
  return out.str();
}

std::string hierarchy_csv(const HierarchyReport& h) {
  std::ostringstream out;
  out << "level,rank,domain,experiment,precision,phi,size\n";
  auto rows = [&](const char* level, const std::vector<HierarchyEntry>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      out << level << ',' << i + 1 << ',' << v[i].domain << ',' << v[i].task << ',' << fmt(v[i].accuracy.precision, 6)
          << ',' << fmt(v[i].accuracy.phi, 6) << ',' << v[i].size << '\n';
    }
  };
  rows("domain", h.domains);
  rows("experiment", h.tasks);
  return out.str();
}

std::filesystem::path resolve_pack(const std::string& pack) {
  std::filesystem::path direct(pack);
  if (std::filesystem::is_directory(direct)) return direct;
  const auto named = std::filesystem::path(MLMATH_CONFIG_DIR) / pack;
  if (std::filesystem::is_directory(named)) return named;
  throw InvalidArgument("no config pack '" + pack + "'");
}

SuiteResult run_suite(const std::filesystem::path& pack_dir, const std::filesystem::path& out_dir,
                      const std::function<void(const std::string&)>& progress) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(pack_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".conf") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InvalidArgument("no .conf files in " + pack_dir.string());
  SuiteResult s;
  for (const auto& f : files) {
    try {
      auto cfg = load_config(f);
      cfg.output = out_dir / cfg.name;
      auto r = run_experiment(cfg);
      if (r.accepted && !*r.accepted) {
        for (const auto& why : r.acceptance_failures) s.failures.push_back(r.name + ": " + why);
      }
      if (progress) {
        progress(r.name + "  precision " + fmt(r.accuracy.precision) + "  phi " + fmt(r.accuracy.phi) +
                 (r.accepted ? (*r.accepted ? "  PASS" : "  FAIL") : "") + "  (" + fmt(r.duration_seconds, 1) + " s)");
      }
      s.reports.push_back(std::move(r));
    } catch (const DataError& e) {
      s.data_error = true;
      s.errors.push_back(f.filename().string() + ": " + e.what());
      if (progress) progress(f.filename().string() + "  ERROR " + e.what());
    } catch (const Error& e) {
      s.errors.push_back(f.filename().string() + ": " + e.what());
      if (progress) progress(f.filename().string() + "  ERROR " + e.what());
    }
  }
  if (s.reports.size() >= 2) {
    try {
      s.hierarchy = hierarchy_report(s.reports);
      std::filesystem::create_directories(out_dir);
      write_file_atomic(out_dir / "hierarchy.json", to_json(s.hierarchy).dump(2) + "\n");
      write_file_atomic(out_dir / "hierarchy.txt", hierarchy_text(s.hierarchy));
      write_file_atomic(out_dir / "hierarchy.csv", hierarchy_csv(s.hierarchy));
    } catch (const InvalidArgument& e) {
      s.errors.push_back(std::string("hierarchy: ") + e.what());
    }
  }
  return s;
}

}  // namespace mlmath
