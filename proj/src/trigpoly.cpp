#include "qquery/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qquery/errors.hpp"

namespace qquery {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int l1(const Frequency& f) {
  int s = 0;
  for (int v : f) s += std::abs(v);
  return s;
}

}  // namespace

// ---------------------------------------------------------------- TrigPoly

TrigPoly::TrigPoly(int n_vars) : n_vars_(n_vars) {
  if (n_vars < 1) throw ContractError("trigonometric polynomial needs at least one variable");
}

TrigPoly TrigPoly::constant(int n_vars, Complex c) {
  TrigPoly t(n_vars);
  t.add_term(c, Frequency(static_cast<std::size_t>(n_vars), 0));
  return t;
}

TrigPoly TrigPoly::monomial(Complex c, Frequency freq) {
  TrigPoly t(static_cast<int>(freq.size()));
  t.add_term(c, freq);
  return t;
}

TrigPoly TrigPoly::sine(int k, double c) {
  // sin(k x) = (e^{ikx} - e^{-ikx}) / 2i
  TrigPoly t(1);
  t.add_term(Complex(0.0, -c / 2.0), {k});
  t.add_term(Complex(0.0, c / 2.0), {-k});
  return t;
}

TrigPoly TrigPoly::cosine(int k, double c) {
  TrigPoly t(1);
  t.add_term(c / 2.0, {k});
  t.add_term(c / 2.0, {-k});
  return t;
}

void TrigPoly::add_term(Complex c, const Frequency& freq) {
  if (static_cast<int>(freq.size()) != n_vars_) {
    throw ContractError("frequency vector has " + std::to_string(freq.size()) + " entries, polynomial has " +
                        std::to_string(n_vars_) + " variables");
  }
  terms_[freq] += c;
}

Complex TrigPoly::evaluate(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != n_vars_) {
    throw ContractError("evaluate: expected " + std::to_string(n_vars_) + " angles, got " + std::to_string(theta.size()));
  }
  Complex sum = 0.0;
  for (const auto& [freq, c] : terms_) {
    double phase = 0.0;
    for (std::size_t k = 0; k < freq.size(); ++k) phase += freq[k] * theta[k];
    sum += c * std::polar(1.0, phase);
  }
  return sum;
}

Complex TrigPoly::evaluate(double theta) const { return evaluate(std::span<const double>(&theta, 1)); }

int TrigPoly::degree() const {
  int d = 0;
  for (const auto& [freq, c] : terms_) {
    if (c != Complex(0.0)) d = std::max(d, l1(freq));
  }
  return d;
}

TrigPoly TrigPoly::derivative() const {
  if (n_vars_ != 1) throw ContractError("derivative is defined for univariate polynomials only");
  TrigPoly out(1);
  for (const auto& [freq, c] : terms_) {
    if (freq[0] != 0) out.add_term(c * Complex(0.0, freq[0]), freq);
  }
  return out;
}

TrigPoly TrigPoly::conj() const {
  TrigPoly out(n_vars_);
  for (const auto& [freq, c] : terms_) {
    Frequency neg = freq;
    for (int& v : neg) v = -v;
    out.add_term(std::conj(c), neg);
  }
  return out;
}

TrigPoly TrigPoly::pruned(double tol) const {
  TrigPoly out(n_vars_);
  for (const auto& [freq, c] : terms_) {
    if (std::abs(c) > tol) out.add_term(c, freq);
  }
  return out;
}

TrigPoly TrigPoly::operator+(const TrigPoly& other) const {
  if (other.n_vars_ != n_vars_) throw ContractError("adding polynomials in different numbers of variables");
  TrigPoly out = *this;
  for (const auto& [freq, c] : other.terms_) out.add_term(c, freq);
  return out;
}

TrigPoly TrigPoly::operator-(const TrigPoly& other) const { return *this + other * Complex(-1.0); }

TrigPoly TrigPoly::operator*(const TrigPoly& other) const {
  if (other.n_vars_ != n_vars_) throw ContractError("multiplying polynomials in different numbers of variables");
  TrigPoly out(n_vars_);
  Frequency f(static_cast<std::size_t>(n_vars_));
  for (const auto& [fa, ca] : terms_) {
    for (const auto& [fb, cb] : other.terms_) {
      for (std::size_t k = 0; k < f.size(); ++k) f[k] = fa[k] + fb[k];
      out.add_term(ca * cb, f);
    }
  }
  return out;
}

TrigPoly TrigPoly::operator*(Complex s) const {
  TrigPoly out = *this;
  for (auto& [freq, c] : out.terms_) c *= s;
  return out;
}

nlohmann::json TrigPoly::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [freq, c] : terms_) arr.push_back({{"re", c.real()}, {"im", c.imag()}, {"freq", freq}});
  return arr;
}

TrigPoly TrigPoly::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ContractError("trigonometric polynomial JSON must be a list of terms");
  if (j.empty()) return TrigPoly(1);
  const auto first = j.front().at("freq").get<Frequency>();
  TrigPoly t(static_cast<int>(first.size()));
  for (const auto& term : j) {
    t.add_term(Complex(term.at("re").get<double>(), term.at("im").get<double>()), term.at("freq").get<Frequency>());
  }
  return t;
}

// ---------------------------------------------------------------- fitting

UnivariateFit fit_univariate(std::span<const std::pair<double, Complex>> samples, int degree) {
  if (degree < 0) throw ContractError("fit degree must be non-negative");
  const std::size_t n_freq = static_cast<std::size_t>(2 * degree + 1);
  if (samples.size() < n_freq) {
    throw ContractError("fit of degree " + std::to_string(degree) + " needs at least " + std::to_string(n_freq) +
                        " samples, got " + std::to_string(samples.size()));
  }
  // Nodes that coincide mod 2 pi make the system rank deficient.
  std::vector<std::pair<double, std::size_t>> reduced;
  reduced.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double r = std::fmod(samples[i].first, kTwoPi);
    if (r < 0) r += kTwoPi;
    reduced.emplace_back(r, i);
  }
  std::sort(reduced.begin(), reduced.end());
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < reduced.size(); ++i) {
    const bool dup_prev = i > 0 && reduced[i].first - reduced[i - 1].first < 1e-12;
    const bool wrap = i + 1 == reduced.size() && i > 0 && reduced[0].first + kTwoPi - reduced[i].first < 1e-12;
    if (!dup_prev && !wrap) ++distinct;
  }
  if (distinct < n_freq) {
    std::ostringstream msg;
    msg << "rank-deficient sample set: only " << distinct << " distinct angles mod 2pi for " << n_freq
        << " frequencies; clustered angles:";
    for (std::size_t i = 1; i < reduced.size(); ++i) {
      if (reduced[i].first - reduced[i - 1].first < 1e-12) {
        msg << " theta[" << reduced[i - 1].second << "]=theta[" << reduced[i].second << "]=" << reduced[i].first;
      }
    }
    throw NumericError(msg.str());
  }

  const auto rows = static_cast<Eigen::Index>(samples.size());
  const auto cols = static_cast<Eigen::Index>(n_freq);
  CMatrix a(rows, cols);
  CVector b(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double th = samples[static_cast<std::size_t>(r)].first;
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = std::polar(1.0, (static_cast<int>(c) - degree) * th);
    b(r) = samples[static_cast<std::size_t>(r)].second;
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(a);
  if (qr.rank() < cols) throw NumericError("rank-deficient trigonometric design matrix (rank " + std::to_string(qr.rank()) + ")");
  const CVector coef = qr.solve(b);

  UnivariateFit out{TrigPoly(1), 0.0};
  for (Eigen::Index c = 0; c < cols; ++c) out.poly.add_term(coef(c), {static_cast<int>(c) - degree});
  out.residual = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(rows));
  return out;
}

UnivariateFit fit_equispaced(std::span<const Complex> values, int n_vars, int degree) {
  if (n_vars < 1 || n_vars > 2) throw ContractError("equispaced fits support 1 or 2 variables");
  if (degree < 0) throw ContractError("fit degree must be non-negative");
  std::size_t k_points = values.size();
  if (n_vars == 2) {
    k_points = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(values.size()))));
    if (k_points * k_points != values.size()) throw ContractError("bivariate grid must be square");
  }
  if (k_points < static_cast<std::size_t>(2 * degree + 1)) {
    throw ContractError("grid of " + std::to_string(k_points) + " points per variable cannot resolve degree " +
                        std::to_string(degree));
  }
  const double kk = static_cast<double>(k_points);
  // twiddle[n + degree][k] = exp(-i n theta_k)
  std::vector<std::vector<Complex>> twiddle(static_cast<std::size_t>(2 * degree + 1), std::vector<Complex>(k_points));
  for (int n = -degree; n <= degree; ++n) {
    for (std::size_t k = 0; k < k_points; ++k) {
      const auto idx = static_cast<long long>(n) * static_cast<long long>(k);
      const long long wrapped = ((idx % static_cast<long long>(k_points)) + static_cast<long long>(k_points)) %
                                static_cast<long long>(k_points);
      twiddle[static_cast<std::size_t>(n + degree)][k] = std::polar(1.0, -kTwoPi * static_cast<double>(wrapped) / kk);
    }
  }

  UnivariateFit out{TrigPoly(n_vars), 0.0};
  if (n_vars == 1) {
    for (int n = -degree; n <= degree; ++n) {
      Complex c = 0.0;
      const auto& tw = twiddle[static_cast<std::size_t>(n + degree)];
      for (std::size_t k = 0; k < k_points; ++k) c += values[k] * tw[k];
      out.poly.add_term(c / kk, {n});
    }
  } else {
    for (int n0 = -degree; n0 <= degree; ++n0) {
      for (int n1 = -degree; n1 <= degree; ++n1) {
        if (std::abs(n0) + std::abs(n1) > degree) continue;
        const auto& t0 = twiddle[static_cast<std::size_t>(n0 + degree)];
        const auto& t1 = twiddle[static_cast<std::size_t>(n1 + degree)];
        Complex c = 0.0;
        for (std::size_t a = 0; a < k_points; ++a) {
          Complex row = 0.0;
          for (std::size_t b = 0; b < k_points; ++b) row += values[a * k_points + b] * t1[b];
          c += row * t0[a];
        }
        out.poly.add_term(c / (kk * kk), {n0, n1});
      }
    }
  }

  double sq = 0.0;
  if (n_vars == 1) {
    for (std::size_t k = 0; k < k_points; ++k) sq += std::norm(out.poly.evaluate(kTwoPi * static_cast<double>(k) / kk) - values[k]);
  } else {
    for (std::size_t a = 0; a < k_points; ++a) {
      for (std::size_t b = 0; b < k_points; ++b) {
        const double th[2] = {kTwoPi * static_cast<double>(a) / kk, kTwoPi * static_cast<double>(b) / kk};
        sq += std::norm(out.poly.evaluate(th) - values[a * k_points + b]);
      }
    }
  }
  out.residual = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

FitReport amplitude_polynomials(const AlgorithmSpec& spec, int degree, std::size_t grid_points,
                                std::size_t holdout_points) {
  if (!spec.phase_only()) throw ContractError("amplitude fitting needs an algorithm with phase queries only");
  const std::size_t n_vars = spec.phase_domain_size();
  if (n_vars < 1 || n_vars > 2) {
    throw ContractError("amplitude fitting supports 1 or 2 angle variables, algorithm has " + std::to_string(n_vars));
  }
  if (grid_points < static_cast<std::size_t>(2 * degree + 1)) {
    throw ContractError("grid needs at least 2*degree+1 points per variable");
  }
  const std::size_t dim = spec.layout().dim();
  const std::size_t total = n_vars == 1 ? grid_points : grid_points * grid_points;
  const double kk = static_cast<double>(grid_points);

  // amps[k][g]: amplitude of outcome k at grid point g.
  std::vector<std::vector<Complex>> amps(dim, std::vector<Complex>(total));
  std::vector<double> th(n_vars);
  for (std::size_t g = 0; g < total; ++g) {
    if (n_vars == 1) {
      th[0] = kTwoPi * static_cast<double>(g) / kk;
    } else {
      th[0] = kTwoPi * static_cast<double>(g / grid_points) / kk;
      th[1] = kTwoPi * static_cast<double>(g % grid_points) / kk;
    }
    const StateVector out = run_with_angles(spec, th);
    for (std::size_t k = 0; k < dim; ++k) amps[k][g] = out[k];
  }

  FitReport report;
  report.degree_used = degree;
  report.polys.reserve(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    UnivariateFit fit = fit_equispaced(amps[k], static_cast<int>(n_vars), degree);
    report.fit_residual = std::max(report.fit_residual, fit.residual);
    report.polys.push_back(std::move(fit.poly));
  }

  // Held-out angles from an additive recurrence; they never land on the grid.
  constexpr double kAlpha[2] = {0.6180339887498949, 0.7548776662466927};
  for (std::size_t h = 0; h < holdout_points; ++h) {
    for (std::size_t v = 0; v < n_vars; ++v) {
      const double u = std::fmod(0.5 / kk + static_cast<double>(h + 1) * kAlpha[v], 1.0);
      th[v] = kTwoPi * u;
    }
    const StateVector out = run_with_angles(spec, th);
    for (std::size_t k = 0; k < dim; ++k) {
      report.holdout_residual = std::max(report.holdout_residual, std::abs(report.polys[k].evaluate(th) - out[k]));
    }
  }
  return report;
}

FitReport amplitude_polynomials(const AlgorithmSpec& spec, int degree) {
  return amplitude_polynomials(spec, degree, static_cast<std::size_t>(2 * degree + 5));
}

TrigPoly success_polynomial(const FitReport& report, std::span<const std::size_t> kept) {
  const int n_vars = report.polys.empty() ? 1 : report.polys.front().n_vars();
  TrigPoly total(n_vars);
  for (std::size_t k : kept) {
    if (k >= report.polys.size()) throw ContractError("kept outcome " + std::to_string(k) + " not covered by the fit");
    total = total + report.polys[k] * report.polys[k].conj();
  }
  return total;
}

// ---------------------------------------------------------------- Bernstein

std::size_t bernstein_grid_size(int degree) { return std::max<std::size_t>(256, 64 * static_cast<std::size_t>(std::max(degree, 0))); }

double refined_sup(const TrigPoly& t, std::size_t grid_size) {
  if (t.n_vars() != 1) throw ContractError("sup-norm refinement is univariate");
  if (grid_size < 3) throw ContractError("grid needs at least 3 points");
  const double h = kTwoPi / static_cast<double>(grid_size);
  std::vector<double> g(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) g[i] = std::abs(t.evaluate(-kPi + h * static_cast<double>(i)));
  double best = *std::max_element(g.begin(), g.end());
  constexpr double kInvPhi = 0.6180339887498949;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double left = g[(i + grid_size - 1) % grid_size];
    const double right = g[(i + 1) % grid_size];
    if (g[i] < left || g[i] < right) continue;
    // Golden-section search on the bracket around the grid maximum.
    double a = -kPi + h * (static_cast<double>(i) - 1.0);
    double b = a + 2.0 * h;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = std::abs(t.evaluate(x1));
    double f2 = std::abs(t.evaluate(x2));
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = std::abs(t.evaluate(x2));
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = std::abs(t.evaluate(x1));
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

BernsteinMargin bernstein_margin(const TrigPoly& t, std::size_t grid_size) {
  if (t.n_vars() != 1) throw ContractError("Bernstein's inequality is checked for univariate polynomials");
  const int deg = t.degree();
  if (grid_size < 64 * static_cast<std::size_t>(deg)) {
    throw ContractError("grid of " + std::to_string(grid_size) + " points is below 64 * degree = " +
                        std::to_string(64 * deg));
  }
  BernsteinMargin out;
  if (deg == 0) return out;
  out.max_derivative = refined_sup(t.derivative(), grid_size);
  out.bound = deg * refined_sup(t, grid_size);
  return out;
}

// ---------------------------------------------------------------- degree bounds

double degree_lower_bound(double x, double delta, double c) {
  const double y = x + delta;
  if (!(x >= 0.0 && x <= 1.0) || !(y >= -1e-15 && y <= 1.0 + 1e-15)) {
    throw ContractError("degree_lower_bound: x and x + delta must lie in [0,1]");
  }
  if (delta == 0.0) throw ContractError("degree_lower_bound: delta must be nonzero");
  const double m = std::abs(x - 0.5) >= std::abs(y - 0.5) ? x : std::clamp(y, 0.0, 1.0);
  const double ad = std::abs(delta);
  return c * (std::sqrt(1.0 / ad) + std::sqrt(m * (1.0 - m)) / ad);
}

bool sin_sq_gap_check(double phi, double psi) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (phi < -1e-15 || phi > kHalfPi + 1e-15 || psi < -1e-15 || psi > kHalfPi + 1e-15) {
    throw ContractError("sin_sq_gap_check: angles must lie in [0, pi/2]");
  }
  const double lhs = (2.0 / std::numbers::pi) * std::abs(phi - psi);
  const double s1 = std::sin(phi);
  const double s2 = std::sin(psi);
  const double rhs = std::sqrt(2.0 * std::abs(s1 * s1 - s2 * s2));
  return lhs <= rhs + 1e-12;
}

}  // namespace qquery
