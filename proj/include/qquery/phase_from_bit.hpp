#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qquery/linalg.hpp"
#include "qquery/oracles.hpp"

namespace qquery {

// Register positions in the simulation layout (index n) (phase 1) (copy n) (value m).
inline constexpr std::size_t kIndexReg = 0;
inline constexpr std::size_t kPhaseReg = 1;
inline constexpr std::size_t kCopyReg = 2;
inline constexpr std::size_t kValueReg = 3;

RegisterLayout simulation_layout(int n, int m);

// |j>|b>|k>|x> -> |j>|b>|k + j mod 2^n>|x>
LinearMap build_copy_add(int n, int m);

// Negates register `reg` modulo its dimension; `modulus` must equal that dimension.
LinearMap build_negate(const RegisterLayout& layout, std::size_t reg, std::size_t modulus);

// Rotates the phase qubit by arcsin(sqrt(beta(decode(x)))) controlled on the
// value register content x. Does not depend on f.
LinearMap build_key_transform(const BitEncoding& enc, PhaseEncoding beta, int n, int m);

struct CircuitStage {
  std::string name;
  LinearMap map;
  bool queries_f = false;
};

/// Two-bit-query circuit approximating the phase query on (index) x (phase).
class SimulationCircuit {
 public:
  SimulationCircuit(int n, int m, BitEncoding enc, PhaseEncoding beta, std::vector<CircuitStage> stages);

  int n() const { return n_; }
  int m() const { return m_; }
  const BitEncoding& encoding() const { return enc_; }
  PhaseEncoding phase_encoding() const { return beta_; }
  const RegisterLayout& layout() const { return layout_; }
  const std::vector<CircuitStage>& stages() const { return stages_; }
  int query_count() const;

  LinearMap composed() const;
  // |j>|b>|0>|0> for all j, b.
  std::vector<StateVector> start_basis() const;
  // Largest amplitude mass left outside the ancilla-zero subspace over the start basis.
  double ancilla_leak() const;
  // The circuit as a map on (index) x (phase) after discarding ancillas.
  // Throws NumericError if the ancillas are not restored within `tol`.
  CMatrix effective_query(double tol = 1e-10) const;

 private:
  int n_;
  int m_;
  BitEncoding enc_;
  PhaseEncoding beta_;
  RegisterLayout layout_;
  std::vector<CircuitStage> stages_;
};

SimulationCircuit assemble_simulation(const OracleFunction& f, int n, int m, const BitEncoding& enc, PhaseEncoding beta);

struct SimulationError {
  double measured = 0.0;            // restricted operator-norm distance to Q^phase_f (x) I
  double analytic_reference = 0.0;  // max_j 2|sin((theta_j - theta'_j)/2)|
  double bound = 0.0;         // 2^{-m/2}; NaN unless beta is the identity
  double ancilla_leak = 0.0;
};

SimulationError simulation_error(const OracleFunction& f, int n, int m, const BitEncoding& enc, PhaseEncoding beta);

// g = decode(encode(f)) pointwise, the function the circuit realizes exactly.
OracleFunction quantized(const OracleFunction& f, const BitEncoding& enc);

}  // namespace qquery
