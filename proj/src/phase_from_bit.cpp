#include "qquery/phase_from_bit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qquery/errors.hpp"

namespace qquery {

RegisterLayout simulation_layout(int n, int m) {
  if (n < 0) throw ContractError("index qubits n must be non-negative");
  if (m < 1) throw ContractError("value qubits m must be positive");
  return RegisterLayout({n, 1, n, m});
}

LinearMap build_copy_add(int n, int m) {
  const RegisterLayout layout = simulation_layout(n, m);
  const std::size_t mod = layout.register_dim(kCopyReg);
  return LinearMap::permutation(layout.dim(), [layout, mod](std::size_t i) {
    const std::size_t j = layout.value(i, kIndexReg);
    const std::size_t k = layout.value(i, kCopyReg);
    return layout.with_value(i, kCopyReg, (k + j) % mod);
  });
}

LinearMap build_negate(const RegisterLayout& layout, std::size_t reg, std::size_t modulus) {
  if (reg >= layout.num_registers()) {
    throw ContractError("negate: register " + std::to_string(reg) + " not in layout of " +
                        std::to_string(layout.num_registers()) + " registers");
  }
  if (modulus != layout.register_dim(reg)) {
    throw ContractError("negate: modulus " + std::to_string(modulus) + " != register dimension " +
                        std::to_string(layout.register_dim(reg)));
  }
  return LinearMap::permutation(layout.dim(), [layout, reg, modulus](std::size_t i) {
    const std::size_t x = layout.value(i, reg);
    return layout.with_value(i, reg, (modulus - x) % modulus);
  });
}

LinearMap build_key_transform(const BitEncoding& enc, PhaseEncoding beta, int n, int m) {
  if (enc.bits() != m) throw ContractError("key transform: encoding has " + std::to_string(enc.bits()) + " bits, m=" + std::to_string(m));
  const RegisterLayout layout = simulation_layout(n, m);
  std::vector<double> thetas(enc.levels());
  for (std::size_t x = 0; x < enc.levels(); ++x) thetas[x] = rotation_angle(beta(enc.decode(x)));
  // With (value, phase) as the local register order, the rotation is block
  // diagonal in x, the same shape as a phase query indexed by x.
  return embed(layout, {kValueReg, kPhaseReg}, phase_query_from_angles(thetas));
}

// ---------------------------------------------------------------- circuit

SimulationCircuit::SimulationCircuit(int n, int m, BitEncoding enc, PhaseEncoding beta, std::vector<CircuitStage> stages)
    : n_(n), m_(m), enc_(std::move(enc)), beta_(beta), layout_(simulation_layout(n, m)), stages_(std::move(stages)) {
  for (const auto& s : stages_) {
    if (s.map.dim_in() != layout_.dim() || s.map.dim_out() != layout_.dim()) {
      throw ContractError("stage '" + s.name + "' does not act on the simulation layout");
    }
  }
}

int SimulationCircuit::query_count() const {
  return static_cast<int>(std::count_if(stages_.begin(), stages_.end(), [](const CircuitStage& s) { return s.queries_f; }));
}

LinearMap SimulationCircuit::composed() const {
  LinearMap total = LinearMap::identity(layout_.dim());
  for (const auto& s : stages_) total = LinearMap::then(total, s.map);
  return total;
}

std::vector<StateVector> SimulationCircuit::start_basis() const {
  std::vector<StateVector> basis;
  const std::size_t big_n = std::size_t{1} << n_;
  basis.reserve(2 * big_n);
  for (std::size_t j = 0; j < big_n; ++j) {
    for (std::size_t b = 0; b < 2; ++b) {
      const std::size_t values[] = {j, b, 0, 0};
      basis.push_back(StateVector::basis(layout_, values));
    }
  }
  return basis;
}

namespace {

bool ancilla_zero(const RegisterLayout& layout, std::size_t i) {
  return layout.value(i, kCopyReg) == 0 && layout.value(i, kValueReg) == 0;
}

}  // namespace

double SimulationCircuit::ancilla_leak() const {
  const LinearMap u = composed();
  double worst = 0.0;
  for (const auto& e : start_basis()) {
    const CVector out = u(e.amplitudes());
    double leak = 0.0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      if (!ancilla_zero(layout_, static_cast<std::size_t>(i))) leak += std::norm(out(i));
    }
    worst = std::max(worst, leak);
  }
  return worst;
}

CMatrix SimulationCircuit::effective_query(double tol) const {
  const LinearMap u = composed();
  const auto basis = start_basis();
  const auto d = static_cast<Eigen::Index>(basis.size());
  CMatrix q(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const CVector out = u(basis[static_cast<std::size_t>(c)].amplitudes());
    double leak = 0.0;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      if (!ancilla_zero(layout_, static_cast<std::size_t>(i))) leak += std::norm(out(i));
    }
    if (leak > tol) {
      throw NumericError("ancillas not restored: column " + std::to_string(c) + " leaks mass " + std::to_string(leak));
    }
    for (Eigen::Index r = 0; r < d; ++r) {
      const std::size_t j = static_cast<std::size_t>(r) / 2;
      const std::size_t b = static_cast<std::size_t>(r) % 2;
      const std::size_t values[] = {j, b, 0, 0};
      q(r, c) = out(static_cast<Eigen::Index>(layout_.index_of(values)));
    }
  }
  return q;
}

SimulationCircuit assemble_simulation(const OracleFunction& f, int n, int m, const BitEncoding& enc, PhaseEncoding beta) {
  if (f.size() != (std::size_t{1} << n)) {
    throw ContractError("oracle has N=" + std::to_string(f.size()) + " points, circuit expects 2^" + std::to_string(n));
  }
  if (enc.bits() != m) throw ContractError("encoding width does not match m");
  const RegisterLayout layout = simulation_layout(n, m);
  const LinearMap copy = build_copy_add(n, m);
  const LinearMap query = embed(layout, {kCopyReg, kValueReg}, build_bit_query(f, enc));

  std::vector<CircuitStage> stages;
  stages.push_back({"copy_add", copy, false});
  stages.push_back({"bit_query", query, true});
  stages.push_back({"key_transform", build_key_transform(enc, beta, n, m), false});
  stages.push_back({"negate_value", build_negate(layout, kValueReg, layout.register_dim(kValueReg)), false});
  stages.push_back({"bit_query", query, true});
  stages.push_back({"negate_copy", build_negate(layout, kCopyReg, layout.register_dim(kCopyReg)), false});
  stages.push_back({"copy_add", copy, false});
  return SimulationCircuit(n, m, enc, beta, std::move(stages));
}

OracleFunction quantized(const OracleFunction& f, const BitEncoding& enc) {
  std::vector<double> g(f.values().size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = enc.decode(enc.encode(f.values()[i]));
  return OracleFunction(std::move(g), f.tau());
}

SimulationError simulation_error(const OracleFunction& f, int n, int m, const BitEncoding& enc, PhaseEncoding beta) {
  const SimulationCircuit circuit = assemble_simulation(f, n, m, enc, beta);
  const std::size_t ancilla_dim = std::size_t{1} << (n + m);
  const LinearMap target = tensor_product(build_phase_query(f, beta), LinearMap::identity(ancilla_dim));

  SimulationError out;
  out.measured = restricted_difference_norm(target, circuit.composed(), circuit.start_basis());
  out.ancilla_leak = circuit.ancilla_leak();
  const OracleFunction g = quantized(f, enc);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double diff = theta_of(f, j, beta) - theta_of(g, j, beta);
    out.analytic_reference = std::max(out.analytic_reference, 2.0 * std::abs(std::sin(diff / 2.0)));
  }
  out.bound = beta.kind() == PhaseEncodingKind::identity ? std::pow(2.0, -m / 2.0)
                                                                : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace qquery
