#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace orlicz::tools {

using json = nlohmann::json;

enum ExitCode : int { kExitPass = 0, kExitValidation = 2, kExitAcceptance = 3, kExitBudget = 4 };

// 0 means unlimited.
struct Budget {
  std::size_t max_samples = 0;  // draws (norm/tail kinds) or paths x n_max (martingale)
  std::size_t max_grid = 0;     // grid points (conjugate, hilbert, fourier)
};

// A metric must satisfy every present field.
struct Bound {
  std::string metric;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<json> equals;
};

struct ExperimentConfig {
  std::string name;
  std::string kind;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  Budget budget;
  json parameters = json::object();
  std::vector<Bound> acceptance;

  // Accepts a bare config or a report (its "config" member).
  static ExperimentConfig from_json(const json& j);
  json to_json() const;
};

const std::vector<std::string>& experiment_kinds();

struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Outcome {
  json metrics = json::object();
  json results = json::object();
  std::vector<Table> tables;
};

// Parses and validates the parameters and checks the budget; throws
// orlicz::Error before any heavy computation. The returned callable runs it.
std::function<Outcome()> prepare(const ExperimentConfig& config);

struct RunResult {
  int exit_code = kExitPass;
  std::string status;        // pass | fail | validation | budget
  std::string headline_metric;
  json headline_value;
  std::optional<Bound> headline_bound;
  std::filesystem::path dir;
  json report;
};

// Writes <out>/<name>/report.json and the CSV tables next to it.
RunResult run(const ExperimentConfig& config);

// Manifest: {"experiments": [config | "relative/path.json", ...]} or a bare array.
// Writes <out>/summary.csv. Returns the suite exit code.
int suite(const std::filesystem::path& manifest, const std::optional<std::filesystem::path>& out,
          std::ostream& log);

// Output root: flag, else config, else ORLICZ_OUT, else "orlicz-out".
std::filesystem::path default_output_root();

std::string version();

}  // namespace orlicz::tools
