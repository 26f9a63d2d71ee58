#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "qquery/errors.hpp"
#include "qquery/phase_from_bit.hpp"

using namespace qquery;

namespace {

CMatrix dense_phase_query(const OracleFunction& f) {
  const Eigen::Index n = static_cast<Eigen::Index>(f.size());
  CMatrix q = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double th = std::asin(std::sqrt(f.at(static_cast<std::size_t>(j))));
    q(2 * j, 2 * j) = std::cos(th);
    q(2 * j, 2 * j + 1) = -std::sin(th);
    q(2 * j + 1, 2 * j) = std::sin(th);
    q(2 * j + 1, 2 * j + 1) = std::cos(th);
  }
  return q;
}

}  // namespace

TEST_CASE("copy-add adds the index into the copy register") {
  const int n = 2, m = 1;
  const RegisterLayout l = simulation_layout(n, m);
  const LinearMap c = build_copy_add(n, m);
  for (std::size_t k = 0; k < l.dim(); ++k) {
    const CVector out = c(StateVector::basis(l, k).amplitudes());
    const std::size_t j = l.value(k, kIndexReg);
    const std::size_t expect = l.with_value(k, kCopyReg, (l.value(k, kCopyReg) + j) % 4);
    CHECK(std::abs(out(static_cast<Eigen::Index>(expect)) - 1.0) < 1e-15);
  }
}

TEST_CASE("negate is an involution") {
  const RegisterLayout l = simulation_layout(1, 3);
  const LinearMap neg = build_negate(l, kValueReg, 8);
  const CMatrix d = neg.dense();
  CHECK((d * d - CMatrix::Identity(d.rows(), d.cols())).norm() < 1e-15);
  CHECK_THROWS_AS(build_negate(l, kValueReg, 4), ContractError);
}

TEST_CASE("key transform is f-independent and unitary") {
  const LinearMap k = build_key_transform(BitEncoding::floor_midpoint(2), PhaseEncoding::identity(), 1, 2);
  CHECK(unitarity_defect(k) < 1e-12);
}

TEST_CASE("ancillas are restored") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n <= 2; ++n) {
    for (int m = 1; m <= 5; ++m) {
      std::vector<double> vals(std::size_t{1} << n);
      for (double& v : vals) v = u(rng);
      const auto c = assemble_simulation(OracleFunction(vals), n, m, BitEncoding::floor_midpoint(m), PhaseEncoding::identity());
      CHECK(c.ancilla_leak() < 1e-12);
      CHECK(c.query_count() == 2);
      CHECK(c.start_basis().size() == (std::size_t{2} << n));
    }
  }
}

TEST_CASE("effective query equals the phase query of the quantized oracle") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = trial % 3, m = 1 + trial % 6;
    std::vector<double> vals(std::size_t{1} << n);
    for (double& v : vals) v = u(rng);
    const OracleFunction f(vals);
    const auto enc = BitEncoding::floor_midpoint(m);
    const CMatrix eff = assemble_simulation(f, n, m, enc, PhaseEncoding::identity()).effective_query();
    const CMatrix expect = dense_phase_query(quantized(f, enc));
    CHECK((eff - expect).norm() < 1e-12);
    // Error against the exact phase query, via dense SVD.
    Eigen::JacobiSVD<CMatrix> svd(CMatrix(eff - dense_phase_query(f)));
    const SimulationError err = simulation_error(f, n, m, enc, PhaseEncoding::identity());
    CHECK(std::abs(err.measured - svd.singularValues()(0)) < 1e-10);
    CHECK(std::abs(err.measured - err.analytic_reference) < 1e-10);
    CHECK(err.measured <= std::pow(2.0, -m / 2.0));
  }
}

TEST_CASE("error shrinks with more value qubits") {
  const OracleFunction f({0.3141, 0.2718});
  double prev = 1.0;
  for (int m = 2; m <= 10; m += 2) {
    const double e = simulation_error(f, 1, m, BitEncoding::floor_midpoint(m), PhaseEncoding::identity()).measured;
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("square phase encoding has no paper bound") {
  const auto err = simulation_error(OracleFunction({0.4}), 0, 3, BitEncoding::floor_midpoint(3), PhaseEncoding::square());
  CHECK(std::isnan(err.bound));
  const double th = std::asin(0.4), thq = std::asin(bit_decode(bit_encode(0.4, 3), 3));
  CHECK(err.measured == doctest::Approx(2.0 * std::abs(std::sin((th - thq) / 2))));
}
