#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qquery/linalg.hpp"
#include "qquery/oracles.hpp"

namespace qquery {

enum class QueryModel { phase, bit, boolean };

std::string to_string(QueryModel model);

/// Where a query acts. Without an index register the oracle domain is {0}.
struct QuerySlot {
  QueryModel model = QueryModel::phase;
  std::optional<std::size_t> index_register;
  std::size_t target_register = 0;
};

// Maps a measured basis index to a value in [0,1].
using SolutionMap = std::function<double(std::size_t)>;

/// U_{n_q} Q U_{n_q-1} ... U_1 Q U_0 acting on a start state, plus the map
/// from measured outcomes to solutions.
class AlgorithmSpec {
 public:
  AlgorithmSpec(RegisterLayout layout, StateVector start, std::vector<LinearMap> unitaries, std::vector<QuerySlot> slots,
                SolutionMap solution);

  const RegisterLayout& layout() const { return layout_; }
  const StateVector& start_state() const { return start_; }
  const std::vector<LinearMap>& unitaries() const { return unitaries_; }
  const std::vector<QuerySlot>& slots() const { return slots_; }
  int query_count() const { return static_cast<int>(slots_.size()); }
  double solution(std::size_t outcome) const { return solution_(outcome); }
  const SolutionMap& solution_map() const { return solution_; }

  bool phase_only() const;
  // Number of distinct rotation angles a phase slot sees (1 or 2^index width).
  std::size_t phase_domain_size() const;

 private:
  RegisterLayout layout_;
  StateVector start_;
  std::vector<LinearMap> unitaries_;
  std::vector<QuerySlot> slots_;
  SolutionMap solution_;
};

/// Accumulates f-independent maps between query slots.
class AlgorithmBuilder {
 public:
  AlgorithmBuilder(RegisterLayout layout, StateVector start);

  AlgorithmBuilder& apply(const LinearMap& u);
  AlgorithmBuilder& apply_on(std::vector<std::size_t> regs, const LinearMap& local);
  AlgorithmBuilder& query(QuerySlot slot);
  AlgorithmSpec build(SolutionMap solution);

  const RegisterLayout& layout() const { return layout_; }

 private:
  RegisterLayout layout_;
  StateVector start_;
  std::vector<LinearMap> done_;
  std::vector<QuerySlot> slots_;
  std::optional<LinearMap> pending_;
};

struct QueryConfig {
  PhaseEncoding phase = PhaseEncoding::identity();
  // Bit-slot encoding; floor/midpoint with the target register width when unset.
  std::optional<BitEncoding> bit;
};

// The full-layout unitary for one query slot.
LinearMap slot_map(const RegisterLayout& layout, const QuerySlot& slot, const OracleFunction& f, const QueryConfig& config);
// Phase slot with the rotation angles given directly.
LinearMap slot_map(const RegisterLayout& layout, const QuerySlot& slot, std::span<const double> thetas);

StateVector run_algorithm(const AlgorithmSpec& spec, const OracleFunction& f, const QueryConfig& config = {});
// Phase-only specs, parameterized by the angles instead of f.
StateVector run_with_angles(const AlgorithmSpec& spec, std::span<const double> thetas);
// The whole algorithm as one map for fixed f.
LinearMap algorithm_map(const AlgorithmSpec& spec, const OracleFunction& f, const QueryConfig& config = {});

/// Solution operator, target precision, and success threshold.
struct ProblemInstance {
  std::function<double(const OracleFunction&)> solution;
  double epsilon = 0.0;
  double success_threshold = 0.75;
};

ProblemInstance evaluation_problem(double epsilon);
ProblemInstance mean_problem(double epsilon, PhaseEncoding beta = PhaseEncoding::identity());

double success_probability(const AlgorithmSpec& spec, const OracleFunction& f, const ProblemInstance& problem,
                           const QueryConfig& config = {});
// Same, for an already computed final state.
double success_probability(const AlgorithmSpec& spec, const CVector& final_state, double target, double epsilon);

// Random phase-query algorithm with Haar unitaries between the slots.
// Layout: [index (0 or 1 qubit), target (1 qubit), work qubits].
AlgorithmSpec random_phase_algorithm(int n_queries, int index_qubits, int work_qubits, std::mt19937_64& rng);

// n_q phase queries on one qubit with nothing in between; amplitudes cos/sin(n_q theta).
AlgorithmSpec sequential_phase_algorithm(int n_queries);

}  // namespace qquery
