#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qquery {

enum class Experiment { sim_error, trig_fit, bernstein, evaluation, mean, perturbation, theorem1 };
enum class OutputFormat { csv, json };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);
OutputFormat parse_format(const std::string& name);

// Dimension budgets enforced by validate().
inline constexpr int kMaxIndexQubits = 3;
inline constexpr int kMaxValueQubits = 10;
inline constexpr int kMaxPrecisionQubits = 7;
inline constexpr int kMaxFitQueries = 4;

struct ExperimentConfig {
  Experiment experiment = Experiment::sim_error;
  std::vector<int> n;        // index qubits
  std::vector<int> m;        // value qubits
  std::vector<int> t;        // precision qubits
  std::vector<double> eps;   // target precisions
  std::vector<int> nq;       // query counts for trig-fit
  std::optional<int> trials; // random instances per grid point; per-experiment default when unset
  std::int64_t seed = 0;
  std::string phase_encoding = "identity";
  std::string out;           // empty: QQUERY_OUT_DIR/<experiment>.<ext>, or stdout
  OutputFormat format = OutputFormat::csv;
};

// Ranges the acceptance runs use.
ExperimentConfig default_config(Experiment e);
int default_trials(Experiment e);

// Keys match the command-line flags; absent keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);

struct Violation {
  enum class Kind { usage, resource };
  Kind kind;
  std::string field;
  std::string message;
};

std::vector<Violation> validate(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment;
  std::optional<int> n, m, t;
  std::optional<double> eps;
  std::optional<int> trial;
  std::string label;  // sub-case within the experiment
  double measured = 0.0;
  double analytic_ref = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct RunResult {
  std::vector<ResultRow> rows;
  bool all_pass() const;
};

// Throws ContractError/ResourceError if the config does not validate.
RunResult run_experiment(const ExperimentConfig& config);

std::string csv_header();
std::string to_csv(const std::vector<ResultRow>& rows);
nlohmann::json to_json(const ExperimentConfig& config, const RunResult& result);

enum ExitCode : int { kExitPass = 0, kExitViolation = 1, kExitUsage = 2, kExitResource = 3 };

// Validates, runs, and writes the output file (or stdout). Returns the exit code.
int run(const ExperimentConfig& config, std::string* error_message = nullptr);

}  // namespace qquery
