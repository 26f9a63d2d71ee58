#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qquery/linalg.hpp"

namespace qquery {

/// Tabulated f : {0..N-1} -> [0,1] together with the input decoder tau.
/// N is padded with zeros up to a power of two.
class OracleFunction {
 public:
  explicit OracleFunction(std::vector<double> values, std::optional<std::vector<std::size_t>> tau = std::nullopt);

  static OracleFunction constant(std::size_t n, double c);

  std::size_t size() const { return values_.size(); }
  int index_qubits() const { return index_qubits_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::size_t>& tau() const { return tau_; }

  // f(tau(j)).
  double at(std::size_t j) const { return values_.at(tau_.at(j)); }

  nlohmann::json to_json() const;
  static OracleFunction from_json(const nlohmann::json& j);

 private:
  std::vector<double> values_;
  std::vector<std::size_t> tau_;
  int index_qubits_ = 0;
};

std::size_t bit_encode(double x, int m);
double bit_decode(std::size_t v, int m);

/// m-bit encoding pair. Any pair must satisfy encode(decode(v)) = v.
class BitEncoding {
 public:
  using Encode = std::function<std::size_t(double)>;
  using Decode = std::function<double(std::size_t)>;

  // Floor encode with midpoint decode.
  static BitEncoding floor_midpoint(int m);
  static BitEncoding custom(int m, Encode encode, Decode decode);

  int bits() const { return m_; }
  std::size_t levels() const { return std::size_t{1} << m_; }
  std::size_t encode(double x) const;
  double decode(std::size_t v) const;

 private:
  BitEncoding(int m, Encode e, Decode d) : m_(m), encode_(std::move(e)), decode_(std::move(d)) {}

  int m_;
  Encode encode_;
  Decode decode_;
};

// Max of |decode(encode(y)) - y| over y = k/(grid_size-1), k = 0..grid_size-1.
// A lower estimate of the supremum; exact for the floor/midpoint pair once
// the grid contains the cell endpoints.
double roundtrip_error(const BitEncoding& enc, std::size_t grid_size);

enum class PhaseEncodingKind { identity, square };

class PhaseEncoding {
 public:
  constexpr PhaseEncoding() = default;
  constexpr explicit PhaseEncoding(PhaseEncodingKind kind) : kind_(kind) {}

  static constexpr PhaseEncoding identity() { return PhaseEncoding(PhaseEncodingKind::identity); }
  static constexpr PhaseEncoding square() { return PhaseEncoding(PhaseEncodingKind::square); }
  static PhaseEncoding parse(const std::string& name);

  PhaseEncodingKind kind() const { return kind_; }
  std::string name() const;
  double operator()(double x) const { return kind_ == PhaseEncodingKind::square ? x * x : x; }

 private:
  PhaseEncodingKind kind_ = PhaseEncodingKind::identity;
};

// arcsin(sqrt(y)) for y in [0,1], clamped against round-off.
double rotation_angle(double y);

double theta_of(const OracleFunction& f, std::size_t j, PhaseEncoding beta);

// Block-diagonal rotation on (index register) x (1 qubit); block j rotates
// by thetas[j]. thetas.size() must be a power of two.
LinearMap phase_query_from_angles(std::span<const double> thetas);

LinearMap build_phase_query(const OracleFunction& f, PhaseEncoding beta);
// |j>|x> -> |j>|x + encode(f(tau(j))) mod 2^m>
LinearMap build_bit_query(const OracleFunction& f, const BitEncoding& enc);
// |j>|b> -> |j>|b xor f(j)>; f must be {0,1}-valued.
LinearMap build_boolean_query(const OracleFunction& f);

}  // namespace qquery
