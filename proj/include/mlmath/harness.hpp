#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mlmath/dataset.hpp"
#include "mlmath/error.hpp"
#include "mlmath/learners.hpp"
#include "mlmath/metrics.hpp"
#include "mlmath/rng.hpp"

namespace mlmath {

inline constexpr const char* kSoftwareVersion = "0.3.0";

using ConfigValue = std::variant<bool, long long, double, std::string>;
enum class ValueType { boolean, integer, decimal, string };
std::string to_string(ValueType t);

/// Literal typing used by config files: true/false, integers, decimals,
/// otherwise a string (surrounding double quotes are stripped).
ConfigValue parse_value(std::string_view text);
std::string format_value(const ConfigValue& v);

using ParamMap = std::map<std::string, ConfigValue>;

struct ParamSpec {
  std::string name;
  ValueType type;
  ConfigValue fallback;
  std::string help;
};

/// A dataset generator addressable from configs and the CLI.
struct TaskInfo {
  std::string id;
  std::string domain;
  std::string summary;
  std::vector<ParamSpec> params;
  /// `params` is complete (defaults filled); relative paths resolve against
  /// `base_dir`.
  std::function<LabeledDataset(const ParamMap& params, RngSeed seed, const std::filesystem::path& base_dir)> generate;
};

const std::vector<TaskInfo>& task_registry();
/// nullptr when unknown.
const TaskInfo* find_task(std::string_view id);

/// Fills defaults and checks names and types; throws InvalidArgument listing
/// every problem.
ParamMap resolve_task_params(const TaskInfo& task, const ParamMap& given);

LabeledDataset generate_task(const std::string& id, const ParamMap& given, RngSeed seed,
                             const std::filesystem::path& base_dir = {});

enum class ProtocolKind { holdout, kfold };

struct Protocol {
  ProtocolKind kind = ProtocolKind::holdout;
  double fraction = 0.8;
  std::size_t k = 5;
};

/// Optional bounds checked by `run` and `suite`.
struct Thresholds {
  std::optional<double> min_precision;
  std::optional<double> max_precision;
  std::optional<double> min_phi;
  std::optional<double> max_phi;
  std::optional<double> max_abs_phi;
  bool any() const { return min_precision || max_precision || min_phi || max_phi || max_abs_phi; }
};

struct ExperimentConfig {
  std::string name;
  std::string task;
  ParamMap task_params;  // resolved, defaults included
  std::string domain;
  LearnerSpec learner;
  Protocol protocol;
  RngSeed seed;
  std::optional<std::filesystem::path> output;
  Thresholds thresholds;
  std::filesystem::path base_dir;
};

struct ConfigIssue {
  std::size_t line = 0;  // 0 when the problem is a missing key
  std::string key;
  std::string message;
};

class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Flat `key = value` text with `#` comments. Required: task, learner,
/// protocol, seed. Optional: name, domain, output, task.<param>,
/// learner.<hyperparameter>, protocol.fraction, protocol.k, accept.<bound>.
/// Throws ConfigError carrying every problem found.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

struct ExperimentReport {
  std::string name;
  std::string task;
  std::string domain;
  nlohmann::ordered_json config;
  nlohmann::ordered_json dataset;
  ProtocolKind protocol = ProtocolKind::holdout;
  AccuracyPair accuracy;          // holdout pair, or the fold means
  std::optional<CvSummary> cv;    // kfold only
  ConfusionMatrix confusion{2};   // summed over folds for kfold
  std::optional<bool> accepted;   // set when thresholds exist
  std::vector<std::string> acceptance_failures;
  double duration_seconds = 0.0;
};

nlohmann::ordered_json to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::ordered_json& j);
std::string report_text(const ExperimentReport& r);

/// Generate, split, fit, predict, score. Writes `<output>.json` and
/// `<output>.txt` atomically when cfg.output is set. Errors are rethrown with
/// the failing stage in the message (DataError stays DataError).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

void write_report(const ExperimentReport& r, const std::filesystem::path& stem);
ExperimentReport read_report(const std::filesystem::path& path);

struct HierarchyEntry {
  std::string domain;
  std::string task;  // experiment name
  AccuracyPair accuracy;
  std::size_t size = 0;
};

struct HierarchyReport {
  std::vector<HierarchyEntry> domains;  // best experiment per domain, descending phi
  std::vector<HierarchyEntry> tasks;    // every experiment, descending phi
};

/// Needs at least two reports spanning at least two domains.
HierarchyReport hierarchy_report(const std::vector<ExperimentReport>& reports);
nlohmann::ordered_json to_json(const HierarchyReport& h);
std::string hierarchy_text(const HierarchyReport& h);
std::string hierarchy_csv(const HierarchyReport& h);

struct SuiteResult {
  std::vector<ExperimentReport> reports;
  HierarchyReport hierarchy;
  std::vector<std::string> failures;  // threshold misses, "<name>: <reason>"
  std::vector<std::string> errors;    // experiments that could not run
  bool data_error = false;            // some error was a DataError
};

/// Runs every *.conf in `pack_dir` in name order, writing reports and the
/// hierarchy (json, txt, csv) into `out_dir`. `progress` receives one line per
/// finished experiment.
SuiteResult run_suite(const std::filesystem::path& pack_dir, const std::filesystem::path& out_dir,
                      const std::function<void(const std::string&)>& progress = {});

/// Directory of a named pack ("default") or the path itself when it exists.
std::filesystem::path resolve_pack(const std::string& pack);

}  // namespace mlmath
