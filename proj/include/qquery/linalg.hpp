#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qquery {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Largest ambient dimension any map or state may have.
inline constexpr std::size_t kMaxDim = std::size_t{1} << 24;
// Largest dimension that may be materialized as a dense matrix.
inline constexpr std::size_t kDenseMaxDim = 4096;

struct Tolerances {
  double absolute = 1e-10;
  double orthonormality = 1e-10;
};

/// Ordered register widths (in qubits). The first register owns the most
/// significant bits of a basis index.
class RegisterLayout {
 public:
  RegisterLayout() = default;
  explicit RegisterLayout(std::vector<int> widths);

  std::size_t num_registers() const { return widths_.size(); }
  int width(std::size_t reg) const { return widths_.at(reg); }
  std::size_t register_dim(std::size_t reg) const { return std::size_t{1} << widths_.at(reg); }
  int total_qubits() const { return total_; }
  std::size_t dim() const { return std::size_t{1} << total_; }
  const std::vector<int>& widths() const { return widths_; }

  std::size_t value(std::size_t index, std::size_t reg) const;
  std::size_t with_value(std::size_t index, std::size_t reg, std::size_t v) const;
  std::size_t index_of(std::span<const std::size_t> values) const;

  // Layout of `this` followed by `other`.
  RegisterLayout concat(const RegisterLayout& other) const;

  bool operator==(const RegisterLayout&) const = default;

 private:
  std::size_t shift(std::size_t reg) const { return shifts_.at(reg); }

  std::vector<int> widths_;
  std::vector<std::size_t> shifts_;
  int total_ = 0;
};

class StateVector {
 public:
  StateVector(RegisterLayout layout, CVector amplitudes);

  static StateVector basis(const RegisterLayout& layout, std::size_t index);
  static StateVector basis(const RegisterLayout& layout, std::span<const std::size_t> values);

  const CVector& amplitudes() const { return amps_; }
  const RegisterLayout& layout() const { return layout_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
  double norm() const { return amps_.norm(); }
  bool is_normalized(double tol = 1e-10) const;

 private:
  RegisterLayout layout_;
  CVector amps_;
};

/// Matrix-free linear operator. Immutable once built; copies share the action.
class LinearMap {
 public:
  using Action = std::function<CVector(const CVector&)>;

  LinearMap(std::size_t dim_in, std::size_t dim_out, Action action, bool unitary = false);

  static LinearMap identity(std::size_t dim);
  static LinearMap zero(std::size_t dim_in, std::size_t dim_out);
  static LinearMap from_matrix(CMatrix m, bool unitary = false);
  // Basis permutation; `perm(i)` is the image index of basis vector i.
  static LinearMap permutation(std::size_t dim, std::function<std::size_t(std::size_t)> perm);
  static LinearMap diagonal(std::size_t dim, std::function<Complex(std::size_t)> entry, bool unitary = true);

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  bool is_unitary() const { return unitary_; }

  CVector operator()(const CVector& v) const;
  CMatrix dense() const;

  // Applies `first`, then `second`.
  static LinearMap then(const LinearMap& first, const LinearMap& second);
  LinearMap operator-(const LinearMap& other) const;
  LinearMap scaled(Complex s) const;

 private:
  std::size_t dim_in_;
  std::size_t dim_out_;
  Action action_;
  bool unitary_;
};

LinearMap tensor_product(const LinearMap& a, const LinearMap& b);

// Lifts `local`, acting on the concatenation of registers `regs` (in the
// given order), to the full layout. Other registers are untouched.
LinearMap embed(const RegisterLayout& layout, std::vector<std::size_t> regs, const LinearMap& local);

StateVector apply(const LinearMap& u, const StateVector& psi);

double spectral_norm(const CMatrix& m);
double spectral_norm(const LinearMap& a);
// Norm of `a` restricted to the span of an orthonormal column basis.
double spectral_norm(const LinearMap& a, const std::vector<StateVector>& domain_basis,
                     const Tolerances& tol = {});

double unitarity_defect(const LinearMap& u);

double restricted_difference_norm(const LinearMap& a, const LinearMap& b,
                                  const std::vector<StateVector>& domain_basis,
                                  const Tolerances& tol = {});

/// Orthogonal projection onto the span of the kept computational basis states.
class MeasurementProjection {
 public:
  explicit MeasurementProjection(std::function<bool(std::size_t)> keep) : keep_(std::move(keep)) {}

  bool keeps(std::size_t outcome) const { return keep_(outcome); }
  CVector project(const CVector& v) const;
  double probability(const CVector& v) const;
  LinearMap as_map(std::size_t dim) const;

 private:
  std::function<bool(std::size_t)> keep_;
};

// Haar-distributed unitary (QR of a complex Gaussian matrix, phase-fixed).
CMatrix haar_unitary(std::size_t dim, std::mt19937_64& rng);
CVector random_state(std::size_t dim, std::mt19937_64& rng);

}  // namespace qquery
