#include "qquery/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "qquery/errors.hpp"

namespace qquery {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::size_t kPrecisionReg = 0;
constexpr std::size_t kIndexRegAE = 1;
constexpr std::size_t kTargetRegAE = 2;

CMatrix hadamard_matrix(int width) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << width);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  CMatrix h(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      h(r, c) = (std::popcount(static_cast<unsigned long long>(r & c)) % 2 == 0) ? s : -s;
    }
  }
  return h;
}

CMatrix inverse_qft_matrix(int width) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << width);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  CMatrix f(d, d);
  for (Eigen::Index z = 0; z < d; ++z) {
    for (Eigen::Index y = 0; y < d; ++y) {
      const auto k = (y * z) % d;
      f(z, y) = std::polar(s, -2.0 * kPi * static_cast<double>(k) / static_cast<double>(d));
    }
  }
  return f;
}

AlgorithmSpec phase_estimation_spec(int n, int t) {
  if (t < 1) throw ContractError("amplitude estimation needs t >= 1 precision qubits");
  if (n < 0) throw ContractError("index qubits must be non-negative");
  const RegisterLayout layout({t, n, 1});
  AlgorithmBuilder b(layout, StateVector::basis(layout, 0));
  const QuerySlot slot{QueryModel::phase, kIndexRegAE, kTargetRegAE};

  const LinearMap h_index = n > 0 ? embed(layout, {kIndexRegAE}, LinearMap::from_matrix(hadamard_matrix(n), true))
                                  : LinearMap::identity(layout.dim());
  const LinearMap z_target = LinearMap::diagonal(
      layout.dim(), [layout](std::size_t i) { return Complex(layout.value(i, kTargetRegAE) == 1 ? -1.0 : 1.0); });

  // State preparation A = Q (H on index), with H on the precision register.
  b.apply_on({kPrecisionReg}, LinearMap::from_matrix(hadamard_matrix(t), true));
  b.apply(h_index);
  b.query(slot);

  for (int k = 0; k < t; ++k) {
    const std::size_t bit = std::size_t{1} << k;
    auto control = [layout, bit](std::size_t i) { return (layout.value(i, kPrecisionReg) & bit) != 0; };
    // Flips the sign of the good (target = 1) states when the control is set.
    const LinearMap flip_good = LinearMap::diagonal(layout.dim(), [layout, control](std::size_t i) {
      return Complex(control(i) && layout.value(i, kTargetRegAE) == 1 ? -1.0 : 1.0);
    });
    // -(I - 2|0><0|) on (index, target) when the control is set.
    const LinearMap reflect_zero = LinearMap::diagonal(layout.dim(), [layout, control](std::size_t i) {
      if (!control(i)) return Complex(1.0);
      const bool zero = layout.value(i, kIndexRegAE) == 0 && layout.value(i, kTargetRegAE) == 0;
      return Complex(zero ? 1.0 : -1.0);
    });
    // Controlled G = -A S_0 A^dag S_chi. A and A^dag run unconditionally and
    // cancel when the control is clear. A^dag = (H on index) Z Q Z.
    for (std::size_t rep = 0; rep < bit; ++rep) {
      b.apply(flip_good);
      b.apply(z_target);
      b.query(slot);
      b.apply(z_target);
      b.apply(h_index);
      b.apply(reflect_zero);
      b.apply(h_index);
      b.query(slot);
    }
  }
  b.apply_on({kPrecisionReg}, LinearMap::from_matrix(inverse_qft_matrix(t), true));
  return b.build([layout, t](std::size_t outcome) { return amplitude_estimate(layout.value(outcome, kPrecisionReg), t); });
}

}  // namespace

AlgorithmSpec evaluation_bit_algorithm(int m) {
  if (m < 1) throw ContractError("evaluation_bit_algorithm: m must be >= 1");
  const RegisterLayout layout({m});
  AlgorithmBuilder b(layout, StateVector::basis(layout, 0));
  b.query(QuerySlot{QueryModel::bit, std::nullopt, 0});
  return b.build([m](std::size_t x) { return bit_decode(x, m); });
}

AlgorithmSpec evaluation_phase_algorithm(int t) { return phase_estimation_spec(0, t); }

AlgorithmSpec mean_estimation_algorithm(int n, int t) { return phase_estimation_spec(n, t); }

int amplitude_estimation_queries(int t) { return (1 << (t + 1)) - 1; }

double amplitude_estimate(std::size_t y, int t) {
  const double s = std::sin(kPi * static_cast<double>(y) / std::ldexp(1.0, t));
  return s * s;
}

double amplitude_estimation_bound(double a, int t) {
  const double m = std::ldexp(1.0, t);
  return 2.0 * kPi * std::sqrt(a * (1.0 - a)) / m + kPi * kPi / (m * m);
}

// ---------------------------------------------------------------- error distributions

double ErrorDistribution::quantile(double q) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    acc += probabilities[i];
    if (acc >= q - 1e-12) return errors[i];
  }
  return errors.empty() ? 0.0 : errors.back();
}

double ErrorDistribution::probability_within(double e) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < errors.size() && errors[i] <= e; ++i) acc += probabilities[i];
  return acc;
}

ErrorDistribution error_distribution(const AlgorithmSpec& spec, const CVector& state, double target) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(static_cast<std::size_t>(state.size()));
  for (Eigen::Index k = 0; k < state.size(); ++k) {
    const double p = std::norm(state(k));
    if (p == 0.0) continue;
    rows.emplace_back(std::abs(spec.solution(static_cast<std::size_t>(k)) - target), p);
  }
  std::sort(rows.begin(), rows.end());
  ErrorDistribution d;
  for (const auto& [e, p] : rows) {
    if (!d.errors.empty() && d.errors.back() == e) {
      d.probabilities.back() += p;
    } else {
      d.errors.push_back(e);
      d.probabilities.push_back(p);
    }
  }
  return d;
}

// ---------------------------------------------------------------- perturbation chain

QueryDifference query_difference_norm(const OracleFunction& f1, const OracleFunction& f2, QueryModel model,
                                      const QueryConfig& config) {
  if (f1.size() != f2.size()) throw ContractError("query_difference_norm: oracles have different domain sizes");
  QueryDifference out;
  switch (model) {
    case QueryModel::phase: {
      out.norm = spectral_norm(build_phase_query(f1, config.phase) - build_phase_query(f2, config.phase));
      for (std::size_t j = 0; j < f1.size(); ++j) {
        const double d = theta_of(f1, j, config.phase) - theta_of(f2, j, config.phase);
        out.block_formula = std::max(out.block_formula, 2.0 * std::abs(std::sin(d / 2.0)));
      }
      return out;
    }
    case QueryModel::bit: {
      if (!config.bit) throw ContractError("bit-model difference needs an explicit bit encoding");
      out.norm = spectral_norm(build_bit_query(f1, *config.bit) - build_bit_query(f2, *config.bit));
      out.block_formula = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    case QueryModel::boolean:
      out.norm = spectral_norm(build_boolean_query(f1) - build_boolean_query(f2));
      out.block_formula = std::numeric_limits<double>::quiet_NaN();
      return out;
  }
  throw ContractError("unknown query model");
}

double perturbation_closed_form(double eps) {
  if (!(eps >= 0.0 && eps <= 0.25)) throw ContractError("perturbation_closed_form: eps must lie in [0, 1/4]");
  return std::sqrt(std::max(0.0, 2.0 - std::sqrt(1.0 + 4.0 * eps) - std::sqrt(1.0 - 4.0 * eps)));
}

PerturbationCheck probability_perturbation_check(const AlgorithmSpec& spec, const OracleFunction& f1,
                                                 const OracleFunction& f2, const std::function<bool(std::size_t)>& kept,
                                                 const QueryConfig& config) {
  if (!spec.phase_only()) throw ContractError("perturbation check needs phase queries in every slot");
  const MeasurementProjection proj(kept);
  const double p1 = proj.probability(run_algorithm(spec, f1, config).amplitudes());
  const double p2 = proj.probability(run_algorithm(spec, f2, config).amplitudes());

  PerturbationCheck out;
  out.lhs = std::abs(p1 - p2);
  out.rhs = 2.0 * spec.query_count() * query_difference_norm(f1, f2, QueryModel::phase, config).norm;
  if (spec.layout().dim() <= 512) {
    out.middle = 2.0 * spectral_norm(algorithm_map(spec, f1, config) - algorithm_map(spec, f2, config));
  } else {
    out.middle = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

namespace {

// U exp(i s K) with K Hermitian Gaussian; s spans near and far pairs.
CMatrix perturbed(const CMatrix& u, std::mt19937_64& rng) {
  const auto n = u.rows();
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix k(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      k(r, c) = Complex(re, im);
    }
  }
  const CMatrix herm = (k + k.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  std::uniform_real_distribution<double> scale(-6.0, 0.0);
  const double s = std::pow(10.0, scale(rng));
  CVector phases(n);
  for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, s * eig.eigenvalues()(i));
  return u * eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

InequalityInstance random_probability_instance(std::size_t dim, std::mt19937_64& rng) {
  const CMatrix u = haar_unitary(dim, rng);
  std::bernoulli_distribution coin(0.5);
  const CMatrix v = coin(rng) ? perturbed(u, rng) : haar_unitary(dim, rng);
  const CVector psi = random_state(dim, rng);
  std::vector<bool> keep(dim);
  for (std::size_t i = 0; i < dim; ++i) keep[i] = coin(rng);
  const MeasurementProjection proj([keep](std::size_t i) { return keep[i]; });
  InequalityInstance out;
  out.lhs = std::abs(proj.probability(u * psi) - proj.probability(v * psi));
  out.rhs = 2.0 * spectral_norm(CMatrix(u - v));
  return out;
}

InequalityInstance random_product_instance(std::size_t dim, std::mt19937_64& rng) {
  const CMatrix a = haar_unitary(dim, rng);
  const CMatrix b = haar_unitary(dim, rng);
  const CMatrix c = perturbed(a, rng);
  const CMatrix d = perturbed(b, rng);
  InequalityInstance out;
  out.lhs = spectral_norm(CMatrix(a * b - c * d));
  out.rhs = spectral_norm(CMatrix(a - c)) + spectral_norm(CMatrix(b - d));
  return out;
}

// ---------------------------------------------------------------- Theorem-1 ingredients

Theorem1Report theorem1_ingredient_check(const AlgorithmSpec& spec, double epsilon, double c) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) throw ContractError("theorem1 check needs 0 < eps < 1/4");
  if (!spec.phase_only()) throw ContractError("theorem1 check needs a phase-query algorithm");
  if (spec.phase_domain_size() != 1) throw ContractError("theorem1 check needs the single-point domain");

  Theorem1Report r;
  r.n_queries = spec.query_count();
  const double x1 = 0.5;
  const double x2 = 0.5 - 2.0 * epsilon;
  auto kept = [&spec, epsilon](std::size_t k) { return std::abs(spec.solution(k) - 0.5) < epsilon; };

  const OracleFunction f1({x1});
  const OracleFunction f2({x2});
  const MeasurementProjection proj(kept);
  r.success_f1 = proj.probability(run_algorithm(spec, f1).amplitudes());
  r.success_f2 = proj.probability(run_algorithm(spec, f2).amplitudes());

  const FitReport fit = amplitude_polynomials(spec, r.n_queries);
  r.fit_residual = std::max(fit.fit_residual, fit.holdout_residual);
  std::vector<std::size_t> kept_list;
  for (std::size_t k = 0; k < spec.layout().dim(); ++k) {
    if (kept(k)) kept_list.push_back(k);
  }
  const TrigPoly t = success_polynomial(fit, kept_list);
  r.fitted_degree = t.pruned(1e-9).degree();
  r.t_at_f1 = t.evaluate(rotation_angle(x1)).real();
  r.t_at_f2 = t.evaluate(rotation_angle(x2)).real();

  const std::size_t grid = bernstein_grid_size(t.degree());
  r.t_min = std::numeric_limits<double>::infinity();
  r.t_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double v = t.evaluate(-kPi + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(grid)).real();
    r.t_min = std::min(r.t_min, v);
    r.t_max = std::max(r.t_max, v);
  }

  r.premise_met = r.t_at_f1 >= 0.75 && r.t_at_f2 <= 0.25;
  r.degree_bound = degree_lower_bound(x2, x1 - x2, c);
  r.bound_satisfied = r.premise_met && 2.0 * r.n_queries >= r.degree_bound;
  return r;
}

}  // namespace qquery
