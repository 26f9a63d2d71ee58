#pragma once

#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qquery/algorithm.hpp"
#include "qquery/linalg.hpp"

namespace qquery {

using Frequency = std::vector<int>;

/// Finite sum of c * exp(i <freq, theta>) with integer frequency vectors.
/// Terms are kept merged by frequency.
class TrigPoly {
 public:
  explicit TrigPoly(int n_vars = 1);

  static TrigPoly constant(int n_vars, Complex c);
  static TrigPoly monomial(Complex c, Frequency freq);
  // c * sin(k theta), c * cos(k theta) in one variable.
  static TrigPoly sine(int k, double c = 1.0);
  static TrigPoly cosine(int k, double c = 1.0);

  int n_vars() const { return n_vars_; }
  const std::map<Frequency, Complex>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  void add_term(Complex c, const Frequency& freq);

  Complex evaluate(std::span<const double> theta) const;
  Complex evaluate(double theta) const;
  // Max l1 norm over frequencies with a nonzero coefficient; 0 for the zero polynomial.
  int degree() const;
  TrigPoly derivative() const;
  // Pointwise complex conjugate for real arguments.
  TrigPoly conj() const;
  // Drops terms with |c| <= tol.
  TrigPoly pruned(double tol) const;

  TrigPoly operator+(const TrigPoly& other) const;
  TrigPoly operator-(const TrigPoly& other) const;
  TrigPoly operator*(const TrigPoly& other) const;
  TrigPoly operator*(Complex s) const;

  nlohmann::json to_json() const;
  static TrigPoly from_json(const nlohmann::json& j);

 private:
  int n_vars_;
  std::map<Frequency, Complex> terms_;
};

struct UnivariateFit {
  TrigPoly poly;
  double residual = 0.0;  // root-mean-square over the samples
};

// Least-squares fit over frequencies {-d..d}.
UnivariateFit fit_univariate(std::span<const std::pair<double, Complex>> samples, int degree);

// Equispaced fit on theta_k = 2 pi k / K via the discrete Fourier transform.
// For two variables `values` is row-major over (theta_0, theta_1) and only
// frequencies with |n_0| + |n_1| <= degree are kept.
UnivariateFit fit_equispaced(std::span<const Complex> values, int n_vars, int degree);

struct FitReport {
  std::vector<TrigPoly> polys;  // one per outcome basis index
  double fit_residual = 0.0;      // max over outcomes of the grid RMS residual
  double holdout_residual = 0.0;  // max |T_k - amplitude| over held-out angles
  int degree_used = 0;
};

// Fits every outcome amplitude of a phase-only algorithm as a function of
// the rotation angles. `grid_points` per variable must be >= 2 * degree + 1.
FitReport amplitude_polynomials(const AlgorithmSpec& spec, int degree, std::size_t grid_points,
                                std::size_t holdout_points = 16);
FitReport amplitude_polynomials(const AlgorithmSpec& spec, int degree);

// sum over kept k of T_k * conj(T_k).
TrigPoly success_polynomial(const FitReport& report, std::span<const std::size_t> kept);

struct BernsteinMargin {
  double max_derivative = 0.0;
  double bound = 0.0;  // degree * max |t|
};

// Grid maxima over [-pi, pi) refined around each local maximum.
BernsteinMargin bernstein_margin(const TrigPoly& t, std::size_t grid_size);
std::size_t bernstein_grid_size(int degree);

// The constant used with the degree bound below. The proof only shows that
// some constant exists; this value is a fixed choice.
inline constexpr double kDegreeBoundConstant = 2.0 / (3.0 * std::numbers::pi);

// c * (sqrt(1/|delta|) + sqrt(m(1-m))/|delta|), m in {x, x+delta} farthest from 1/2.
double degree_lower_bound(double x, double delta, double c = kDegreeBoundConstant);

// (2/pi)|phi - psi| <= sqrt(2 |sin^2 phi - sin^2 psi|) with slack 1e-12.
bool sin_sq_gap_check(double phi, double psi);

// sup |t| and sup |t'| helpers on a dense grid with local refinement.
double refined_sup(const TrigPoly& t, std::size_t grid_size);

}  // namespace qquery
