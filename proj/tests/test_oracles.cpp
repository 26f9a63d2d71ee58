#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qquery/errors.hpp"
#include "qquery/oracles.hpp"

using namespace qquery;

TEST_CASE("oracle function pads and decodes") {
  OracleFunction f({0.1, 0.2, 0.3});
  CHECK(f.size() == 4);
  CHECK(f.index_qubits() == 2);
  CHECK(f.at(3) == 0.0);
  OracleFunction g({0.1, 0.2}, std::vector<std::size_t>{1, 0});
  CHECK(g.at(0) == 0.2);
  CHECK_THROWS_AS(OracleFunction({0.1, 0.2}, std::vector<std::size_t>{0, 0}), ContractError);
  CHECK_THROWS_AS(OracleFunction({1.5}), ContractError);
  const OracleFunction back = OracleFunction::from_json(g.to_json());
  CHECK(back.values() == g.values());
  CHECK(back.tau() == g.tau());
  CHECK(OracleFunction::from_json(nlohmann::json::array({0.25, 0.5})).at(1) == 0.5);
}

TEST_CASE("floor encoding and midpoint decoding") {
  CHECK(bit_encode(0.0, 3) == 0);
  CHECK(bit_encode(0.124, 3) == 0);
  CHECK(bit_encode(0.125, 3) == 1);
  CHECK(bit_encode(1.0, 3) == 7);
  CHECK(bit_decode(0, 3) == doctest::Approx(1.0 / 16));
  CHECK(bit_decode(7, 3) == doctest::Approx(15.0 / 16));
  for (int m = 1; m <= 12; ++m) {
    for (std::size_t v = 0; v < (std::size_t{1} << m); ++v) CHECK(bit_encode(bit_decode(v, m), m) == v);
  }
}

TEST_CASE("round-trip error equals half a cell") {
  for (int m = 1; m <= 12; ++m) {
    const double e = roundtrip_error(BitEncoding::floor_midpoint(m), (std::size_t{1} << m) * 4 + 1);
    CHECK(e == doctest::Approx(std::ldexp(1.0, -m - 1)).epsilon(1e-12));
  }
}

TEST_CASE("custom encodings must round-trip") {
  CHECK_THROWS_AS(BitEncoding::custom(2, [](double) { return std::size_t{0}; }, [](std::size_t v) { return v / 3.0; }),
                  ContractError);
}

TEST_CASE("phase query rotates each block") {
  const OracleFunction f({0.25, 0.75});
  const CMatrix q = build_phase_query(f, PhaseEncoding::identity()).dense();
  for (int j = 0; j < 2; ++j) {
    const double th = std::asin(std::sqrt(f.at(j)));
    CHECK(std::abs(q(2 * j, 2 * j) - std::cos(th)) < 1e-15);
    CHECK(std::abs(q(2 * j + 1, 2 * j) - std::sin(th)) < 1e-15);
    CHECK(std::abs(q(2 * j, 2 * j + 1) + std::sin(th)) < 1e-15);
  }
  // |<1|Q|0>|^2 = f(j)
  CHECK(std::norm(q(1, 0)) == doctest::Approx(0.25));
  const CMatrix qs = build_phase_query(f, PhaseEncoding::square()).dense();
  CHECK(std::norm(qs(3, 2)) == doctest::Approx(0.75 * 0.75));
}

TEST_CASE("bit query adds modulo 2^m") {
  const OracleFunction f({0.0, 0.5, 0.9, 1.0});
  const int m = 3;
  const CMatrix q = build_bit_query(f, BitEncoding::floor_midpoint(m)).dense();
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t x = 0; x < 8; ++x) {
      const std::size_t col = j * 8 + x;
      const std::size_t row = j * 8 + (x + bit_encode(f.at(j), m)) % 8;
      CHECK(std::abs(q(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) - 1.0) < 1e-15);
    }
  }
}

TEST_CASE("boolean query") {
  const CMatrix q = build_boolean_query(OracleFunction({0.0, 1.0})).dense();
  CHECK(std::abs(q(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(q(3, 2) - 1.0) < 1e-15);
  CHECK_THROWS_AS(build_boolean_query(OracleFunction({0.5})), ContractError);
}

TEST_CASE("random oracles are unitary") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = trial % 4;
    std::vector<double> vals(std::size_t{1} << n);
    for (double& v : vals) v = u(rng);
    const OracleFunction f(vals);
    CHECK(unitarity_defect(build_phase_query(f, PhaseEncoding::identity())) < 1e-12);
    CHECK(unitarity_defect(build_bit_query(f, BitEncoding::floor_midpoint(1 + trial % 5))) < 1e-12);
  }
}

TEST_CASE("phase encoding names") {
  CHECK(PhaseEncoding::parse("square").kind() == PhaseEncodingKind::square);
  CHECK(PhaseEncoding::parse("identity").name() == "identity");
  CHECK_THROWS_AS(PhaseEncoding::parse("cube"), ContractError);
}
