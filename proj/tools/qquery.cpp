#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qquery/errors.hpp"
#include "qquery/runner.hpp"

namespace {

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    // a:b expands to the inclusive integer range
    if constexpr (std::is_integral_v<T>) {
      if (auto colon = item.find(':'); colon != std::string::npos) {
        const int lo = std::stoi(item.substr(0, colon));
        const int hi = std::stoi(item.substr(colon + 1));
        for (int k = lo; k <= hi; ++k) out.push_back(k);
        continue;
      }
    }
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_integral_v<T>) {
      v = static_cast<T>(std::stoll(item, &used));
    } else {
      v = std::stod(item, &used);
    }
    if (used != item.size()) throw qquery::ContractError(std::string("bad value '") + item + "' for --" + flag);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run query-complexity experiments and check their bounds"};
  std::string experiment, config_path, out, format, phase_encoding;
  std::string n, m, t, eps, nq;
  std::int64_t seed = 0;
  int trials = 0;
  app.add_option("--experiment,-e", experiment,
                 "sim-error | trig-fit | bernstein | evaluation | mean | perturbation | theorem1");
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  app.add_option("--seed", seed, "Base RNG seed");
  app.add_option("--out,-o", out, "Output file (default: $QQUERY_OUT_DIR/<experiment>.<ext>, else stdout)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--n", n, "Index qubits, comma list or lo:hi");
  app.add_option("--m", m, "Value qubits, comma list or lo:hi");
  app.add_option("--t", t, "Precision qubits, comma list or lo:hi");
  app.add_option("--eps", eps, "Target precisions, comma list");
  app.add_option("--nq", nq, "Query counts for trig-fit, comma list or lo:hi");
  app.add_option("--trials", trials, "Random instances per grid point");
  app.add_option("--phase-encoding", phase_encoding, "identity | square");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qquery::kExitUsage;
  }

  qquery::ExperimentConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw qquery::ContractError("cannot read config file " + config_path);
      const nlohmann::json j = nlohmann::json::parse(in);
      config = qquery::config_from_json(j);
      if (!experiment.empty() && qquery::parse_experiment(experiment) != config.experiment) {
        const auto keep_seed = config.seed;
        config = qquery::default_config(qquery::parse_experiment(experiment));
        config.seed = keep_seed;
      }
    } else {
      if (experiment.empty()) throw qquery::ContractError("--experiment or --config is required");
      config = qquery::default_config(qquery::parse_experiment(experiment));
    }
    if (app.count("--seed")) config.seed = seed;
    if (app.count("--out")) config.out = out;
    if (app.count("--format")) config.format = qquery::parse_format(format);
    if (app.count("--n")) config.n = parse_list<int>(n, "n");
    if (app.count("--m")) config.m = parse_list<int>(m, "m");
    if (app.count("--t")) config.t = parse_list<int>(t, "t");
    if (app.count("--eps")) config.eps = parse_list<double>(eps, "eps");
    if (app.count("--nq")) config.nq = parse_list<int>(nq, "nq");
    if (app.count("--trials")) config.trials = trials;
    if (app.count("--phase-encoding")) config.phase_encoding = phase_encoding;
  } catch (const std::exception& e) {
    std::cerr << "qquery: " << e.what() << "\n";
    return qquery::kExitUsage;
  }

  std::string message;
  const int code = qquery::run(config, &message);
  if (!message.empty()) std::cerr << "qquery: " << message << (message.back() == '\n' ? "" : "\n");
  if (code == qquery::kExitViolation) std::cerr << "qquery: some rows violate their bound\n";
  return code;
}
