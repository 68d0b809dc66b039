#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlmath/dataset.hpp"
#include "mlmath/harness.hpp"
#include "mlmath/io.hpp"

using namespace mlmath;

namespace {

enum Exit { kOk = 0, kUsage = 1, kAcceptance = 2, kData = 3 };

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--params expects key=value, got '" + item + "'");
    std::string key(trim(std::string_view(item).substr(0, eq)));
    if (key.rfind("task.", 0) == 0) key = key.substr(5);
    out[key] = parse_value(std::string_view(item).substr(eq + 1));
  }
  return out;
}

void list_tasks() {
  for (const auto& t : task_registry()) {
    std::printf("%-24s [%s] %s\n", t.id.c_str(), t.domain.c_str(), t.summary.c_str());
    for (const auto& p : t.params) {
      std::printf("    %-14s %-8s default %-12s %s\n", p.name.c_str(), to_string(p.type).c_str(),
                  format_value(p.fallback).c_str(), p.help.c_str());
    }
  }
}

int cmd_gen(const std::string& task, const std::vector<std::string>& params, const std::string& out,
            std::uint64_t seed) {
  const auto ds = generate_task(task, parse_params(params), RngSeed{seed}, std::filesystem::current_path());
  write_csv(ds, out);
  std::printf("%s: %zu examples, shape %s, classes", task.c_str(), ds.size(), ds.shape().to_string().c_str());
  for (auto c : ds.class_counts()) std::printf(" %zu", c);
  std::printf(" -> %s\n", out.c_str());
  return kOk;
}

int cmd_run(const std::string& path, const std::string& out) {
  auto cfg = load_config(path);
  if (!out.empty()) cfg.output = out;
  if (!cfg.output) cfg.output = std::filesystem::path("reports") / cfg.name;
  const auto r = run_experiment(cfg);
  std::fputs(report_text(r).c_str(), stdout);
  std::printf("report      %s.json\n", cfg.output->string().c_str());
  return r.accepted && !*r.accepted ? kAcceptance : kOk;
}

int cmd_suite(const std::string& pack, const std::string& out_dir) {
  const auto dir = resolve_pack(pack);
  const auto s = run_suite(dir, out_dir, [](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
  });
  if (!s.hierarchy.domains.empty()) std::printf("\n%s", hierarchy_text(s.hierarchy).c_str());
  for (const auto& e : s.errors) std::fprintf(stderr, "error: %s\n", e.c_str());
  for (const auto& f : s.failures) std::printf("acceptance failure: %s\n", f.c_str());
  std::printf("%zu experiments, %zu acceptance failures, %zu errors; reports in %s\n", s.reports.size(),
              s.failures.size(), s.errors.size(), out_dir.c_str());
  if (s.data_error) return kData;
  if (!s.errors.empty()) return kUsage;
  return s.failures.empty() ? kOk : kAcceptance;
}

int cmd_hierarchy(const std::vector<std::string>& files, const std::string& out) {
  std::vector<ExperimentReport> reports;
  for (const auto& f : files) reports.push_back(read_report(f));
  const auto h = hierarchy_report(reports);
  std::fputs(hierarchy_text(h).c_str(), stdout);
  if (!out.empty()) {
    const std::filesystem::path stem(out);
    if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
    write_file_atomic(std::filesystem::path(out + ".json"), to_json(h).dump(2) + "\n");
    write_file_atomic(std::filesystem::path(out + ".txt"), hierarchy_text(h));
    write_file_atomic(std::filesystem::path(out + ".csv"), hierarchy_csv(h));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervised-learning benchmarks on generated mathematical datasets"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a dataset and write it as CSV");
  std::string task, out;
  std::vector<std::string> params;
  std::uint64_t seed = 1;
  bool list = false;
  gen->add_option("task", task, "task id (see --list)");
  gen->add_option("--params,-p", params, "task parameters as key=value")->take_all();
  gen->add_option("--out,-o", out, "output CSV");
  gen->add_option("--seed,-s", seed, "seed");
  gen->add_flag("--list", list, "list tasks and their parameters");

  auto* run = app.add_subcommand("run", "run one experiment config");
  std::string config, run_out;
  run->add_option("config", config, "config file")->required();
  run->add_option("--out,-o", run_out, "report path stem (default reports/<name>)");

  auto* suite = app.add_subcommand("suite", "run every config in a pack");
  std::string pack = "default", out_dir = "reports";
  suite->add_option("--pack", pack, "pack name or directory");
  suite->add_option("--out-dir", out_dir, "report directory");

  auto* report = app.add_subcommand("report", "summaries over existing reports");
  report->require_subcommand(1);
  auto* hier = report->add_subcommand("hierarchy", "rank domains and experiments by phi");
  std::vector<std::string> files;
  std::string hier_out;
  hier->add_option("reports", files, "report JSON files")->required();
  hier->add_option("--out,-o", hier_out, "write <stem>.json, .txt and .csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      if (list) {
        list_tasks();
        return kOk;
      }
      if (task.empty() || out.empty()) {
        std::fprintf(stderr, "gen needs a task and --out (use --list for tasks)\n");
        return kUsage;
      }
      return cmd_gen(task, params, out, seed);
    }
    if (*run) return cmd_run(config, run_out);
    if (*suite) return cmd_suite(pack, out_dir);
    if (*hier) return cmd_hierarchy(files, hier_out);
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
