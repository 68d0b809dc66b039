#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mlmath/harness.hpp"
#include "mlmath/io.hpp"

using namespace mlmath;

namespace {

const char* kMinimal =
    "task = quadratic-multiplicity\n"
    "task.count = 20000\n"
    "learner = decision_tree\n"
    "protocol = holdout\n"
    "seed = 7\n";

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mlmath_harness_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

nlohmann::ordered_json without_duration(nlohmann::ordered_json j) {
  j.erase("duration_seconds");
  return j;
}

}  // namespace

TEST_CASE("config values are typed") {
  CHECK(std::get<long long>(parse_value("12")) == 12);
  CHECK(std::get<double>(parse_value("0.8")) == doctest::Approx(0.8));
  CHECK(std::get<bool>(parse_value("true")));
  CHECK(std::get<std::string>(parse_value("svm")) == "svm");
  CHECK(std::get<std::string>(parse_value("\"3 5 7\"")) == "3 5 7");
  CHECK(format_value(ConfigValue{2.0}) == "2.0");
}

TEST_CASE("minimal config parses") {
  auto cfg = parse_config(kMinimal);
  CHECK(cfg.task == "quadratic-multiplicity");
  CHECK(cfg.name == "quadratic-multiplicity");
  CHECK(cfg.domain == "algebraic-geometry");
  CHECK(cfg.learner.kind() == LearnerKind::decision_tree);
  CHECK(cfg.protocol.kind == ProtocolKind::holdout);
  CHECK(cfg.protocol.fraction == 0.8);
  CHECK(cfg.seed.value == 7);
  CHECK(std::get<long long>(cfg.task_params.at("count")) == 20000);
  CHECK(std::get<long long>(cfg.task_params.at("bound")) == 10);
}

TEST_CASE("learner hyperparameters and comments") {
  auto cfg = parse_config(
      "# comment line\n"
      "task = parity   # trailing comment\n"
      "learner = svm\n"
      "learner.c = 10\n"
      "learner.kernel = linear\n"
      "protocol = kfold\n"
      "protocol.k = 3\n"
      "seed = 1\n");
  const auto& p = std::get<SvmParams>(cfg.learner.params);
  CHECK(p.c == 10.0);
  CHECK(p.kernel == SvmKernel::linear);
  CHECK(cfg.protocol.k == 3);
  auto mlp = parse_config("task = parity\nlearner = mlp\nlearner.layers = \"16 8\"\nprotocol = holdout\nseed = 1\n");
  CHECK(std::get<MlpParams>(mlp.learner.params).layers == std::vector<std::size_t>{16, 8});
}

TEST_CASE("config errors are all reported with lines") {
  try {
    parse_config(
        "task = quadratic-multiplicity\n"
        "learner = perceptron\n"
        "protocol = kfold\n"
        "protocol.k = 1\n"
        "task.count = many\n"
        "colour = blue\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& issues = e.issues();
    auto has = [&](std::size_t line, const std::string& key) {
      for (const auto& i : issues) {
        if (i.line == line && i.key == key) return true;
      }
      return false;
    };
    CHECK(has(0, "seed"));
    CHECK(has(2, "learner"));
    CHECK(has(4, "protocol.k"));
    CHECK(has(5, "task.count"));
    CHECK(has(6, "colour"));
    CHECK(std::string(e.what()).find("perceptron") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("task = nope\nlearner = knn\nprotocol = holdout\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("task = parity\nlearner = knn\nprotocol = holdout\nseed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("task = parity\nlearner = knn\nlearner.k = -3\nprotocol = holdout\nseed = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config("task = parity\nlearner = knn\nprotocol = holdout\nprotocol.fraction = 1.5\nseed = 1\n"),
      ConfigError);
}

TEST_CASE("holdout experiment is deterministic") {
  const auto dir = scratch("determinism");
  auto cfg = parse_config(kMinimal);
  cfg.output = dir / "a";
  auto r1 = run_experiment(cfg);
  cfg.output = dir / "b";
  auto r2 = run_experiment(cfg);
  CHECK(r1.accuracy.precision == r2.accuracy.precision);
  CHECK(r1.accuracy.phi == r2.accuracy.phi);
  CHECK(r1.accuracy.precision > 0.6);
  CHECK(r1.confusion.total() == 982);  // floor(0.2 * 2456) per class
  auto a = nlohmann::ordered_json::parse(read_file(dir / "a.json"));
  auto b = nlohmann::ordered_json::parse(read_file(dir / "b.json"));
  CHECK(without_duration(a).dump() == without_duration(b).dump());
  CHECK(std::filesystem::exists(dir / "a.txt"));
  auto back = read_report(dir / "a.json");
  CHECK(back.accuracy.precision == r1.accuracy.precision);
  CHECK(back.confusion == r1.confusion);
  CHECK(to_json(back).dump() == a.dump());
  std::filesystem::remove_all(dir);
}

TEST_CASE("kfold experiment") {
  auto cfg = parse_config(
      "task = parity\ntask.count = 1000\nlearner = decision_tree\nprotocol = kfold\nprotocol.k = 5\nseed = 3\n");
  auto r = run_experiment(cfg);
  REQUIRE(r.cv);
  CHECK(r.cv->per_fold.size() == 5);
  CHECK(r.confusion.total() == 1000);
  CHECK(r.accuracy.precision == doctest::Approx(r.cv->mean_precision));
  auto j = to_json(r);
  CHECK(j["cross_validation"]["folds"].size() == 5);
}

TEST_CASE("thresholds") {
  auto cfg = parse_config(std::string(kMinimal) + "accept.min_precision = 0.999\naccept.max_abs_phi = 2\n");
  auto r = run_experiment(cfg);
  REQUIRE(r.accepted);
  CHECK_FALSE(*r.accepted);
  CHECK(r.acceptance_failures.size() == 1);
  auto ok = run_experiment(parse_config(std::string(kMinimal) + "accept.min_precision = 0.1\n"));
  CHECK(*ok.accepted);
}

TEST_CASE("stage errors") {
  auto cfg = parse_config(
      "task = cicy-hodge\ntask.path = /nonexistent/list.txt\nlearner = knn\nprotocol = holdout\nseed = 1\n");
  try {
    run_experiment(cfg);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).rfind("generate:", 0) == 0);
  }
  CHECK_THROWS_AS(generate_task("nope", {}, RngSeed{1}), InvalidArgument);
  CHECK_THROWS_AS(generate_task("parity", {{"count", std::string("x")}}, RngSeed{1}), InvalidArgument);
  CHECK_THROWS_AS(generate_task("parity", {{"size", 10LL}}, RngSeed{1}), InvalidArgument);
}

TEST_CASE("every registered task generates at small scale") {
  const std::map<std::string, ParamMap> small = {
      {"quadratic-multiplicity", {{"count", 1000LL}}},
      {"quadratic-real-roots", {{"count", 2000LL}}},
      {"parity", {{"count", 100LL}}},
      {"cicy-hodge", {{"copies", 1LL}}},
      {"group-vs-latin", {{"per_class", 10LL}}},
      {"simple-groups", {{"max_order", 12LL}, {"per_class", 10LL}}},
      {"su3-terms", {{"max_weight", 2LL}, {"max_label", 3LL}}},
      {"graph", {{"property", std::string("planar")}, {"per_class", 10LL}}},
      {"prime-window", {{"i_max", 2000LL}, {"offset", 50LL}, {"window", 10LL}, {"per_class", 100LL}}},
      {"liouville-window", {{"i_max", 2000LL}, {"offset", 50LL}, {"window", 10LL}, {"per_class", 100LL}}},
      {"modp-fixed", {{"p", 3LL}, {"count", 300LL}}},
      {"modp-variable", {{"count", 200LL}}},
      {"curves", {{"property", std::string("rank")}, {"n_primes", 20LL}}},
  };
  CHECK(small.size() == task_registry().size());
  for (const auto& t : task_registry()) {
    CAPTURE(t.id);
    REQUIRE(small.count(t.id));
    auto ds = generate_task(t.id, small.at(t.id), RngSeed{1});
    CHECK(ds.size() > 0);
    auto again = generate_task(t.id, small.at(t.id), RngSeed{1});
    CHECK(std::vector<double>(ds.feature_data().begin(), ds.feature_data().end()) ==
          std::vector<double>(again.feature_data().begin(), again.feature_data().end()));
  }
}

TEST_CASE("hierarchy report") {
  auto parity = run_experiment(parse_config(
      "name = parity\ntask = parity\ntask.count = 2000\nlearner = svm\nprotocol = holdout\nseed = 1\n"));
  auto liouville = run_experiment(parse_config(
      "name = liouville\ntask = liouville-window\ntask.i_max = 6000\ntask.window = 20\ntask.offset = 100\n"
      "task.per_class = 1000\nlearner = knn\nprotocol = holdout\nseed = 1\n"));
  auto primes = run_experiment(parse_config(
      "name = primes\ntask = prime-window\ntask.i_max = 6000\ntask.window = 20\ntask.offset = 100\n"
      "task.per_class = 600\nlearner = knn\nprotocol = holdout\nseed = 1\n"));
  CHECK(parity.accuracy.phi > 0.9);
  CHECK(std::abs(liouville.accuracy.phi) < 0.15);
  auto h = hierarchy_report({liouville, primes, parity});
  REQUIRE(h.domains.size() == 2);
  CHECK(h.domains[0].domain == "numerical-analysis");
  CHECK(h.domains[1].domain == "analytic-number-theory");
  CHECK(h.domains[1].task == "primes");
  REQUIRE(h.tasks.size() == 3);
  CHECK(h.tasks.front().task == "parity");
  CHECK(h.tasks.back().task == "liouville");
  CHECK_THROWS_AS(hierarchy_report({liouville, primes}), InvalidArgument);
  CHECK_THROWS_AS(hierarchy_report({}), InvalidArgument);
  const auto csv = hierarchy_csv(h);
  CHECK(csv.rfind("level,rank,domain,experiment,precision,phi,size\n", 0) == 0);
  CHECK(split(csv, '\n').size() == 1 + 2 + 3 + 1);
  CHECK(to_json(h)["experiments"].size() == 3);
}

TEST_CASE("suite runner on a small pack") {
  const auto dir = scratch("pack");
  const auto out = dir / "reports";
  std::ofstream(dir / "a.conf") << "name = a\ntask = parity\ntask.count = 400\nlearner = decision_tree\n"
                                   "protocol = holdout\nseed = 1\naccept.min_precision = 0.5\n";
  std::ofstream(dir / "b.conf") << "name = b\ntask = modp-fixed\ntask.count = 600\ntask.n_max = 255\n"
                                   "learner = logistic\nprotocol = holdout\nseed = 1\naccept.min_precision = 1.01\n";
  auto s = run_suite(dir, out);
  CHECK(s.reports.size() == 2);
  CHECK(s.errors.empty());
  REQUIRE(s.failures.size() == 1);
  CHECK(s.failures[0].rfind("b:", 0) == 0);
  CHECK(std::filesystem::exists(out / "a.json"));
  CHECK(std::filesystem::exists(out / "hierarchy.csv"));
  std::ofstream(dir / "c.conf") << "task = parity\n";
  auto s2 = run_suite(dir, out);
  CHECK(s2.errors.size() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("default pack parses") {
  const auto pack = resolve_pack("default");
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(pack)) {
    if (e.path().extension() != ".conf") continue;
    CAPTURE(e.path().filename().string());
    CHECK_NOTHROW(load_config(e.path()));
    ++n;
  }
  CHECK(n >= 12);
}
