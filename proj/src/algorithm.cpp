#include "qquery/algorithm.hpp"

#include <cmath>
#include <string>

#include "qquery/errors.hpp"

namespace qquery {

std::string to_string(QueryModel model) {
  switch (model) {
    case QueryModel::phase:
      return "phase";
    case QueryModel::bit:
      return "bit";
    case QueryModel::boolean:
      return "boolean";
  }
  return "unknown";
}

// ---------------------------------------------------------------- algorithm

AlgorithmSpec::AlgorithmSpec(RegisterLayout layout, StateVector start, std::vector<LinearMap> unitaries,
                             std::vector<QuerySlot> slots, SolutionMap solution)
    : layout_(std::move(layout)),
      start_(std::move(start)),
      unitaries_(std::move(unitaries)),
      slots_(std::move(slots)),
      solution_(std::move(solution)) {
  if (unitaries_.size() != slots_.size() + 1) {
    throw ContractError("algorithm needs n_q + 1 unitaries for n_q = " + std::to_string(slots_.size()) + " slots, got " +
                        std::to_string(unitaries_.size()));
  }
  if (start_.dim() != layout_.dim()) throw ContractError("start state does not match the algorithm layout");
  for (const auto& u : unitaries_) {
    if (u.dim_in() != layout_.dim() || u.dim_out() != layout_.dim()) {
      throw ContractError("algorithm unitary dimension " + std::to_string(u.dim_in()) + " != layout dimension " +
                          std::to_string(layout_.dim()));
    }
  }
  for (const auto& s : slots_) {
    if (s.target_register >= layout_.num_registers() ||
        (s.index_register && *s.index_register >= layout_.num_registers())) {
      throw ContractError("query slot refers to a register outside the layout");
    }
    if (s.index_register && *s.index_register == s.target_register) {
      throw ContractError("query slot uses the same register as index and target");
    }
    if (s.model != QueryModel::bit && layout_.width(s.target_register) != 1) {
      throw ContractError(to_string(s.model) + " query target must be a single qubit");
    }
  }
  if (!solution_) throw ContractError("algorithm needs a solution map");
}

bool AlgorithmSpec::phase_only() const {
  for (const auto& s : slots_) {
    if (s.model != QueryModel::phase) return false;
  }
  return true;
}

std::size_t AlgorithmSpec::phase_domain_size() const {
  std::size_t size = 1;
  bool first = true;
  for (const auto& s : slots_) {
    const std::size_t d = s.index_register ? layout_.register_dim(*s.index_register) : 1;
    if (!first && d != size) throw ContractError("phase slots disagree on the oracle domain size");
    size = d;
    first = false;
  }
  return size;
}

// ---------------------------------------------------------------- builder

AlgorithmBuilder::AlgorithmBuilder(RegisterLayout layout, StateVector start)
    : layout_(std::move(layout)), start_(std::move(start)) {
  if (start_.dim() != layout_.dim()) throw ContractError("builder start state does not match layout");
}

AlgorithmBuilder& AlgorithmBuilder::apply(const LinearMap& u) {
  pending_ = pending_ ? LinearMap::then(*pending_, u) : u;
  return *this;
}

AlgorithmBuilder& AlgorithmBuilder::apply_on(std::vector<std::size_t> regs, const LinearMap& local) {
  return apply(embed(layout_, std::move(regs), local));
}

AlgorithmBuilder& AlgorithmBuilder::query(QuerySlot slot) {
  done_.push_back(pending_ ? *pending_ : LinearMap::identity(layout_.dim()));
  pending_.reset();
  slots_.push_back(slot);
  return *this;
}

AlgorithmSpec AlgorithmBuilder::build(SolutionMap solution) {
  std::vector<LinearMap> unitaries = done_;
  unitaries.push_back(pending_ ? *pending_ : LinearMap::identity(layout_.dim()));
  return AlgorithmSpec(layout_, start_, std::move(unitaries), slots_, std::move(solution));
}

// ---------------------------------------------------------------- running

namespace {

std::vector<std::size_t> slot_registers(const QuerySlot& slot) {
  if (slot.index_register) return {*slot.index_register, slot.target_register};
  return {slot.target_register};
}

std::size_t slot_domain(const RegisterLayout& layout, const QuerySlot& slot) {
  return slot.index_register ? layout.register_dim(*slot.index_register) : 1;
}

}  // namespace

LinearMap slot_map(const RegisterLayout& layout, const QuerySlot& slot, const OracleFunction& f,
                   const QueryConfig& config) {
  if (f.size() != slot_domain(layout, slot)) {
    throw ContractError("oracle has N=" + std::to_string(f.size()) + " points but the query slot addresses " +
                        std::to_string(slot_domain(layout, slot)));
  }
  switch (slot.model) {
    case QueryModel::phase:
      return embed(layout, slot_registers(slot), build_phase_query(f, config.phase));
    case QueryModel::bit: {
      const int width = layout.width(slot.target_register);
      const BitEncoding enc = config.bit ? *config.bit : BitEncoding::floor_midpoint(width);
      if (enc.bits() != width) throw ContractError("bit encoding width does not match the slot's target register");
      return embed(layout, slot_registers(slot), build_bit_query(f, enc));
    }
    case QueryModel::boolean:
      return embed(layout, slot_registers(slot), build_boolean_query(f));
  }
  throw ContractError("unknown query model");
}

LinearMap slot_map(const RegisterLayout& layout, const QuerySlot& slot, std::span<const double> thetas) {
  if (slot.model != QueryModel::phase) throw ContractError("angle-parameterized slots must use the phase model");
  if (thetas.size() != slot_domain(layout, slot)) throw ContractError("wrong number of rotation angles for slot");
  return embed(layout, slot_registers(slot), phase_query_from_angles(thetas));
}

namespace {

template <typename SlotFn>
StateVector run_impl(const AlgorithmSpec& spec, SlotFn&& slot_fn) {
  CVector state = spec.unitaries().front()(spec.start_state().amplitudes());
  for (std::size_t k = 0; k < spec.slots().size(); ++k) {
    state = slot_fn(spec.slots()[k])(state);
    state = spec.unitaries()[k + 1](state);
  }
  return StateVector(spec.layout(), std::move(state));
}

}  // namespace

StateVector run_algorithm(const AlgorithmSpec& spec, const OracleFunction& f, const QueryConfig& config) {
  // Slots sharing a placement reuse one map.
  std::vector<std::pair<QuerySlot, LinearMap>> cache;
  auto lookup = [&](const QuerySlot& s) -> const LinearMap& {
    for (const auto& [key, map] : cache) {
      if (key.model == s.model && key.index_register == s.index_register && key.target_register == s.target_register) {
        return map;
      }
    }
    cache.emplace_back(s, slot_map(spec.layout(), s, f, config));
    return cache.back().second;
  };
  return run_impl(spec, lookup);
}

StateVector run_with_angles(const AlgorithmSpec& spec, std::span<const double> thetas) {
  std::vector<std::pair<QuerySlot, LinearMap>> cache;
  auto lookup = [&](const QuerySlot& s) -> const LinearMap& {
    for (const auto& [key, map] : cache) {
      if (key.index_register == s.index_register && key.target_register == s.target_register) return map;
    }
    cache.emplace_back(s, slot_map(spec.layout(), s, thetas));
    return cache.back().second;
  };
  return run_impl(spec, lookup);
}

LinearMap algorithm_map(const AlgorithmSpec& spec, const OracleFunction& f, const QueryConfig& config) {
  LinearMap total = spec.unitaries().front();
  for (std::size_t k = 0; k < spec.slots().size(); ++k) {
    total = LinearMap::then(total, slot_map(spec.layout(), spec.slots()[k], f, config));
    total = LinearMap::then(total, spec.unitaries()[k + 1]);
  }
  return total;
}

// ---------------------------------------------------------------- problems

ProblemInstance evaluation_problem(double epsilon) {
  return {[](const OracleFunction& f) { return f.values().front(); }, epsilon, 0.75};
}

ProblemInstance mean_problem(double epsilon, PhaseEncoding beta) {
  return {[beta](const OracleFunction& f) {
            double s = 0.0;
            for (std::size_t j = 0; j < f.size(); ++j) s += beta(f.at(j));
            return s / static_cast<double>(f.size());
          },
          epsilon, 0.75};
}

double success_probability(const AlgorithmSpec& spec, const CVector& final_state, double target, double epsilon) {
  double p = 0.0;
  for (Eigen::Index k = 0; k < final_state.size(); ++k) {
    const double prob = std::norm(final_state(k));
    if (prob == 0.0) continue;
    if (std::abs(target - spec.solution(static_cast<std::size_t>(k))) < epsilon) p += prob;
  }
  return p;
}

double success_probability(const AlgorithmSpec& spec, const OracleFunction& f, const ProblemInstance& problem,
                           const QueryConfig& config) {
  const StateVector out = run_algorithm(spec, f, config);
  return success_probability(spec, out.amplitudes(), problem.solution(f), problem.epsilon);
}

// ---------------------------------------------------------------- generators

AlgorithmSpec random_phase_algorithm(int n_queries, int index_qubits, int work_qubits, std::mt19937_64& rng) {
  if (n_queries < 0) throw ContractError("query count must be non-negative");
  if (index_qubits < 0 || index_qubits > 1) throw ContractError("random algorithms support 0 or 1 index qubits");
  const RegisterLayout layout({index_qubits, 1, work_qubits});
  if (layout.dim() > 16) throw ResourceError("random algorithm dimension exceeds 16");
  AlgorithmBuilder b(layout, StateVector::basis(layout, 0));
  const QuerySlot slot{QueryModel::phase, std::size_t{0}, 1};
  b.apply(LinearMap::from_matrix(haar_unitary(layout.dim(), rng), true));
  for (int q = 0; q < n_queries; ++q) {
    b.query(slot);
    b.apply(LinearMap::from_matrix(haar_unitary(layout.dim(), rng), true));
  }
  return b.build([](std::size_t) { return 0.0; });
}

AlgorithmSpec sequential_phase_algorithm(int n_queries) {
  const RegisterLayout layout({1});
  AlgorithmBuilder b(layout, StateVector::basis(layout, 0));
  for (int q = 0; q < n_queries; ++q) b.query(QuerySlot{QueryModel::phase, std::nullopt, 0});
  return b.build([](std::size_t k) { return static_cast<double>(k); });
}

}  // namespace qquery
