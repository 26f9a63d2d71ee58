#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "qquery/algorithm.hpp"
#include "qquery/trigpoly.hpp"

namespace qquery {

// ---------------------------------------------------------------- evaluation / mean

/// One m-bit query on |0>, decoded with the midpoint map.
AlgorithmSpec evaluation_bit_algorithm(int m);

/// Amplitude estimation of f(0) with t precision qubits.
/// Layout: [precision t] [index 0] [target 1].
AlgorithmSpec evaluation_phase_algorithm(int t);

/// Amplitude estimation of (1/N) sum_j beta(f(tau(j))) over N = 2^n points.
/// Layout: [precision t] [index n] [target 1].
AlgorithmSpec mean_estimation_algorithm(int n, int t);

// Phase queries used by the amplitude-estimation specs: one to prepare the
// state plus two per controlled Grover iterate, 2^t - 1 iterates in total.
int amplitude_estimation_queries(int t);

// sin^2(pi y / 2^t)
double amplitude_estimate(std::size_t y, int t);

// Outcome error distribution of `state` against `target`, sorted by error.
struct ErrorDistribution {
  std::vector<double> errors;
  std::vector<double> probabilities;

  // Smallest e with P(error <= e) >= q.
  double quantile(double q) const;
  double probability_within(double e) const;
};

ErrorDistribution error_distribution(const AlgorithmSpec& spec, const CVector& state, double target);

// 2 pi sqrt(a(1-a))/M + pi^2/M^2 with M = 2^t; holds with probability >= 8/pi^2.
double amplitude_estimation_bound(double a, int t);

// ---------------------------------------------------------------- perturbation chain

struct QueryDifference {
  double norm = 0.0;           // spectral norm of Q_{f1} - Q_{f2}
  double block_formula = 0.0;  // max_j 2|sin((theta1_j - theta2_j)/2)| (phase model)
};

QueryDifference query_difference_norm(const OracleFunction& f1, const OracleFunction& f2, QueryModel model,
                                      const QueryConfig& config = {});

// sqrt(2 - sqrt(1+4 eps) - sqrt(1-4 eps)): the phase-query distance for f1(0) = 1/2, f2(0) = 1/2 - 2 eps.
double perturbation_closed_form(double eps);

struct PerturbationCheck {
  double lhs = 0.0;     // |p_{f1} - p_{f2}|
  double middle = 0.0;  // 2 ||A_{f1} - A_{f2}||, NaN when too large to form densely
  double rhs = 0.0;     // 2 n_q ||Q_{f1} - Q_{f2}||
  bool holds(double slack = 1e-9) const { return lhs <= rhs + slack; }
};

PerturbationCheck probability_perturbation_check(const AlgorithmSpec& spec, const OracleFunction& f1,
                                                 const OracleFunction& f2, const std::function<bool(std::size_t)>& kept,
                                                 const QueryConfig& config = {});

// |p_U - p_V| <= 2||U - V|| for a random start state and projection.
struct InequalityInstance {
  double lhs = 0.0;
  double rhs = 0.0;
};
InequalityInstance random_probability_instance(std::size_t dim, std::mt19937_64& rng);
// ||AB - CD|| <= ||A - C|| + ||B - D|| for Haar unitaries.
InequalityInstance random_product_instance(std::size_t dim, std::mt19937_64& rng);

// ---------------------------------------------------------------- lower-bound ingredients

struct Theorem1Report {
  bool premise_met = false;
  double success_f1 = 0.0;  // simulated success probability at f1(0) = 1/2
  double success_f2 = 0.0;  // at f2(0) = 1/2 - 2 eps
  double t_at_f1 = 0.0;     // fitted T(arcsin sqrt(1/2))
  double t_at_f2 = 0.0;
  double t_min = 0.0;  // range of T on a dense grid
  double t_max = 0.0;
  int n_queries = 0;
  int fitted_degree = 0;  // degree of T after dropping |c| <= 1e-9
  double fit_residual = 0.0;
  double degree_bound = 0.0;
  bool bound_satisfied = false;  // 2 n_q >= degree_bound
};

Theorem1Report theorem1_ingredient_check(const AlgorithmSpec& spec, double epsilon, double c = kDegreeBoundConstant);

}  // namespace qquery
