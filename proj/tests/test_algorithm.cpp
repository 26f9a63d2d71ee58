#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qquery/algorithm.hpp"
#include "qquery/errors.hpp"

using namespace qquery;

namespace {

CMatrix hadamard() {
  CMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("builder composes maps between queries") {
  RegisterLayout l({1});
  AlgorithmBuilder b(l, StateVector::basis(l, 0));
  b.apply(LinearMap::from_matrix(hadamard(), true)).query({QueryModel::phase, std::nullopt, 0});
  b.apply(LinearMap::from_matrix(hadamard(), true));
  const AlgorithmSpec spec = b.build([](std::size_t k) { return static_cast<double>(k); });
  CHECK(spec.query_count() == 1);
  CHECK(spec.unitaries().size() == 2);
  CHECK(spec.phase_only());
  CHECK(spec.phase_domain_size() == 1);

  // H R(theta) H |0> by hand.
  const double f0 = 0.3, th = std::asin(std::sqrt(f0));
  CMatrix r(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const CVector expect = hadamard() * r * hadamard() * CVector::Unit(2, 0);
  const StateVector out = run_algorithm(spec, OracleFunction({f0}));
  CHECK((out.amplitudes() - expect).norm() < 1e-14);
  const double thetas[] = {th};
  CHECK((run_with_angles(spec, thetas).amplitudes() - expect).norm() < 1e-14);
  CHECK((algorithm_map(spec, OracleFunction({f0})).dense() * CVector::Unit(2, 0) - expect).norm() < 1e-14);
}

TEST_CASE("spec validates unitary count") {
  RegisterLayout l({1});
  CHECK_THROWS_AS(AlgorithmSpec(l, StateVector::basis(l, 0), {LinearMap::identity(2)},
                                {QuerySlot{QueryModel::phase, std::nullopt, 0}}, [](std::size_t) { return 0.0; }),
                  ContractError);
}

TEST_CASE("success probability counts outcomes strictly inside epsilon") {
  RegisterLayout l({2});
  CVector psi = CVector::Constant(4, 0.5);
  AlgorithmSpec spec(l, StateVector(l, psi), {LinearMap::identity(4)}, {},
                     [](std::size_t k) { return static_cast<double>(k) / 4.0; });
  CHECK(success_probability(spec, psi, 0.25, 0.3) == doctest::Approx(0.75));
  CHECK(success_probability(spec, psi, 0.25, 0.25) == doctest::Approx(0.25));
  // Monotone in epsilon.
  double prev = 0.0;
  for (double e : {0.01, 0.1, 0.26, 0.6, 1.0}) {
    const double p = success_probability(spec, psi, 0.4, e);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("problems") {
  const OracleFunction f({0.2, 0.4, 0.6, 0.8});
  CHECK(evaluation_problem(0.1).solution(f) == doctest::Approx(0.2));
  CHECK(mean_problem(0.1).solution(f) == doctest::Approx(0.5));
  CHECK(mean_problem(0.1, PhaseEncoding::square()).solution(f) == doctest::Approx((0.04 + 0.16 + 0.36 + 0.64) / 4));
}

TEST_CASE("random algorithms are norm preserving") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int idx = trial % 2;
    const AlgorithmSpec spec = random_phase_algorithm(1 + trial % 4, idx, 2 - idx, rng);
    CHECK(spec.layout().dim() <= 16);
    std::vector<double> vals(std::size_t{1} << idx);
    for (double& v : vals) v = u(rng);
    CHECK(std::abs(run_algorithm(spec, OracleFunction(vals)).norm() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(random_phase_algorithm(2, 1, 3, rng), ResourceError);
}

TEST_CASE("bit slot uses the configured encoding") {
  RegisterLayout l({2});
  AlgorithmBuilder b(l, StateVector::basis(l, 0));
  b.query({QueryModel::bit, std::nullopt, 0});
  const AlgorithmSpec spec = b.build([](std::size_t k) { return bit_decode(k, 2); });
  const StateVector out = run_algorithm(spec, OracleFunction({0.6}));
  CHECK(std::abs(out[bit_encode(0.6, 2)]) == doctest::Approx(1.0));
  CHECK(to_string(QueryModel::boolean) == "boolean");
}
