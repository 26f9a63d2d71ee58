#include "qquery/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "qquery/errors.hpp"

namespace qquery {

namespace {

void check_bits(int m) {
  if (m < 1 || m > 20) throw ContractError("bit count m=" + std::to_string(m) + " outside [1, 20]");
}

}  // namespace

// ---------------------------------------------------------------- oracle function

OracleFunction::OracleFunction(std::vector<double> values, std::optional<std::vector<std::size_t>> tau)
    : values_(std::move(values)) {
  if (values_.empty()) throw ContractError("oracle function needs at least one value");
  for (std::size_t j = 0; j < values_.size(); ++j) {
    const double v = values_[j];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractError("oracle value f(" + std::to_string(j) + ") = " + std::to_string(v) + " outside [0,1]");
    }
  }
  std::size_t n = 1;
  while (n < values_.size()) {
    n <<= 1;
    ++index_qubits_;
  }
  values_.resize(n, 0.0);

  if (tau) {
    tau_ = std::move(*tau);
    if (tau_.size() < n) {
      // Padded points keep their own index.
      for (std::size_t j = tau_.size(); j < n; ++j) tau_.push_back(j);
    }
    if (tau_.size() != n) throw ContractError("tau has more entries than the domain");
    std::vector<bool> seen(n, false);
    for (std::size_t t : tau_) {
      if (t >= n || seen[t]) throw ContractError("tau is not a permutation of {0..N-1}");
      seen[t] = true;
    }
  } else {
    tau_.resize(n);
    for (std::size_t j = 0; j < n; ++j) tau_[j] = j;
  }
}

OracleFunction OracleFunction::constant(std::size_t n, double c) { return OracleFunction(std::vector<double>(n, c)); }

nlohmann::json OracleFunction::to_json() const {
  nlohmann::json j;
  j["values"] = values_;
  j["tau"] = tau_;
  return j;
}

OracleFunction OracleFunction::from_json(const nlohmann::json& j) {
  if (j.is_array()) return OracleFunction(j.get<std::vector<double>>());
  if (!j.is_object() || !j.contains("values")) throw ContractError("oracle JSON must be an array or {\"values\": [...]}");
  std::optional<std::vector<std::size_t>> tau;
  if (j.contains("tau")) tau = j.at("tau").get<std::vector<std::size_t>>();
  return OracleFunction(j.at("values").get<std::vector<double>>(), std::move(tau));
}

// ---------------------------------------------------------------- bit encodings

std::size_t bit_encode(double x, int m) {
  check_bits(m);
  if (!(x >= 0.0 && x <= 1.0)) throw ContractError("bit_encode: x=" + std::to_string(x) + " outside [0,1]");
  const std::size_t top = (std::size_t{1} << m) - 1;
  // The floor cell map is defined on [0,1); x = 1 is clamped into the top cell.
  const auto v = static_cast<std::size_t>(std::floor(std::ldexp(x, m)));
  return std::min(v, top);
}

double bit_decode(std::size_t v, int m) {
  check_bits(m);
  if (v >= (std::size_t{1} << m)) {
    throw ContractError("bit_decode: v=" + std::to_string(v) + " outside {0.." +
                        std::to_string((std::size_t{1} << m) - 1) + "}");
  }
  return std::ldexp(static_cast<double>(v), -m) + std::ldexp(1.0, -m - 1);
}

BitEncoding BitEncoding::floor_midpoint(int m) {
  check_bits(m);
  return BitEncoding(
      m, [m](double x) { return bit_encode(x, m); }, [m](std::size_t v) { return bit_decode(v, m); });
}

BitEncoding BitEncoding::custom(int m, Encode encode, Decode decode) {
  check_bits(m);
  BitEncoding enc(m, std::move(encode), std::move(decode));
  for (std::size_t v = 0; v < enc.levels(); ++v) {
    const double x = enc.decode_(v);
    if (!(x >= 0.0 && x <= 1.0)) throw ContractError("custom encoding: decode(" + std::to_string(v) + ") outside [0,1]");
    if (enc.encode_(x) != v) {
      throw ContractError("custom encoding violates encode(decode(v)) = v at v=" + std::to_string(v));
    }
  }
  return enc;
}

std::size_t BitEncoding::encode(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw ContractError("encode: x=" + std::to_string(x) + " outside [0,1]");
  const std::size_t v = encode_(x);
  if (v >= levels()) throw ContractError("encode produced a value outside the register alphabet");
  return v;
}

double BitEncoding::decode(std::size_t v) const {
  if (v >= levels()) throw ContractError("decode: v=" + std::to_string(v) + " outside the register alphabet");
  return decode_(v);
}

double roundtrip_error(const BitEncoding& enc, std::size_t grid_size) {
  if (grid_size < 2) throw ContractError("roundtrip_error: grid needs at least 2 points");
  double worst = 0.0;
  const double step = 1.0 / static_cast<double>(grid_size - 1);
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double y = k + 1 == grid_size ? 1.0 : static_cast<double>(k) * step;
    worst = std::max(worst, std::abs(enc.decode(enc.encode(y)) - y));
  }
  return worst;
}

// ---------------------------------------------------------------- phase encodings

PhaseEncoding PhaseEncoding::parse(const std::string& name) {
  if (name == "identity" || name == "id") return identity();
  if (name == "square") return square();
  throw ContractError("unknown phase encoding '" + name + "' (expected identity|square)");
}

std::string PhaseEncoding::name() const { return kind_ == PhaseEncodingKind::square ? "square" : "identity"; }

double rotation_angle(double y) { return std::asin(std::sqrt(std::clamp(y, 0.0, 1.0))); }

double theta_of(const OracleFunction& f, std::size_t j, PhaseEncoding beta) {
  if (j >= f.size()) throw ContractError("theta_of: index out of range");
  return rotation_angle(beta(f.at(j)));
}

// ---------------------------------------------------------------- queries

LinearMap phase_query_from_angles(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  if (n == 0 || (n & (n - 1)) != 0) throw ContractError("phase query needs a power-of-two number of angles");
  auto cs = std::make_shared<std::vector<std::pair<double, double>>>();
  cs->reserve(n);
  for (double t : thetas) cs->emplace_back(std::cos(t), std::sin(t));
  return LinearMap(
      2 * n, 2 * n,
      [cs](const CVector& v) {
        CVector out(v.size());
        for (std::size_t j = 0; j < cs->size(); ++j) {
          const auto [c, s] = (*cs)[j];
          const auto i0 = static_cast<Eigen::Index>(2 * j);
          const Complex a0 = v(i0);
          const Complex a1 = v(i0 + 1);
          out(i0) = c * a0 - s * a1;
          out(i0 + 1) = s * a0 + c * a1;
        }
        return out;
      },
      true);
}

LinearMap build_phase_query(const OracleFunction& f, PhaseEncoding beta) {
  std::vector<double> thetas(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) thetas[j] = theta_of(f, j, beta);
  return phase_query_from_angles(thetas);
}

LinearMap build_bit_query(const OracleFunction& f, const BitEncoding& enc) {
  const std::size_t levels = enc.levels();
  std::vector<std::size_t> shift(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) shift[j] = enc.encode(f.at(j));
  const std::size_t dim = f.size() * levels;
  if (dim > kMaxDim) throw ResourceError("bit query dimension exceeds budget 2^24");
  return LinearMap::permutation(dim, [shift, levels](std::size_t i) {
    const std::size_t j = i / levels;
    const std::size_t x = i % levels;
    return j * levels + (x + shift[j]) % levels;
  });
}

LinearMap build_boolean_query(const OracleFunction& f) {
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double v = f.values()[j];
    if (v != 0.0 && v != 1.0) {
      throw ContractError("boolean query: f(" + std::to_string(j) + ") = " + std::to_string(v) + " is not 0 or 1");
    }
  }
  // For m = 1, encode is the identity on {0,1} and addition mod 2 is XOR.
  auto identity_bit = BitEncoding::custom(
      1, [](double x) { return x >= 0.5 ? std::size_t{1} : std::size_t{0}; },
      [](std::size_t v) { return static_cast<double>(v); });
  return build_bit_query(f, identity_bit);
}

}  // namespace qquery
