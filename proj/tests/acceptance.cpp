// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qquery/experiments.hpp"
#include "qquery/phase_from_bit.hpp"
#include "qquery/runner.hpp"
#include "qquery/trigpoly.hpp"

using namespace qquery;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-34s %6.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Floor encode / midpoint decode written out by hand.
double midpoint_roundtrip(double y, int m) {
  const double levels = std::ldexp(1.0, m);
  double k = std::floor(y * levels);
  if (k > levels - 1) k = levels - 1;
  return (k + 0.5) / levels;
}

std::vector<ResultRow> rows_with(const std::vector<ResultRow>& rows, const std::string& label) {
  std::vector<ResultRow> out;
  for (const auto& r : rows) {
    if (r.label == label) out.push_back(r);
  }
  return out;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

CMatrix phase_query_dense(const std::vector<double>& theta) {
  const Eigen::Index n = static_cast<Eigen::Index>(theta.size());
  CMatrix q = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double c = std::cos(theta[j]), s = std::sin(theta[j]);
    q(2 * j, 2 * j) = c;
    q(2 * j, 2 * j + 1) = -s;
    q(2 * j + 1, 2 * j) = s;
    q(2 * j + 1, 2 * j + 1) = c;
  }
  return q;
}

}  // namespace

int main() {
  report(1, "simulation bound", [] {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    double worst_ratio = 0.0, worst_closed = 0.0, worst_svd = 0.0;
    int cases = 0;
    for (int n = 0; n <= 3; ++n) {
      for (int m = 1; m <= 8; ++m) {
        std::mt19937_64 rng(1000003ULL * static_cast<unsigned>(n) + static_cast<unsigned>(m));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const BitEncoding enc = BitEncoding::floor_midpoint(m);
        for (int trial = 0; trial < 20; ++trial) {
          std::vector<double> vals(std::size_t{1} << n);
          for (double& v : vals) v = u(rng);
          const OracleFunction f(vals);
          const SimulationError err = simulation_error(f, n, m, enc, PhaseEncoding::identity());
          double closed = 0.0;
          std::vector<double> th, th_q;
          for (double v : vals) {
            const double a = std::asin(std::sqrt(v));
            const double b = std::asin(std::sqrt(midpoint_roundtrip(v, m)));
            th.push_back(a);
            th_q.push_back(b);
            closed = std::max(closed, 2.0 * std::abs(std::sin((a - b) / 2.0)));
          }
          worst_ratio = std::max(worst_ratio, err.measured / std::ldexp(1.0, -m) * err.measured);
          worst_closed = std::max(worst_closed, std::abs(err.measured - closed));
          if (err.measured > std::pow(2.0, -m / 2.0)) o.pass = false;
          if (std::abs(err.measured - closed) > 1e-9) o.pass = false;
          // Dense SVD of the effective map on a subset.
          if (trial < 3) {
            const CMatrix eff = assemble_simulation(f, n, m, enc, PhaseEncoding::identity()).effective_query();
            const CMatrix diff = eff - phase_query_dense(th);
            Eigen::JacobiSVD<CMatrix> svd(diff);
            worst_svd = std::max(worst_svd, std::abs(svd.singularValues()(0) - err.measured));
            if (std::abs(svd.singularValues()(0) - err.measured) > 1e-9) o.pass = false;
          }
          ++cases;
        }
      }
    }
    const double secs = elapsed_since(t0);
    if (secs > 120.0) o.pass = false;
    o.detail = std::to_string(cases) + " oracles; max |measured-closed|=" + fmt("%.2e", worst_closed) +
               " max |measured-svd|=" + fmt("%.2e", worst_svd) + " max err^2*2^m=" + fmt("%.3f", worst_ratio);
    return o;
  });

  report(2, "round-trip error", [] {
    Outcome o;
    double worst_excess = -1.0;
    for (int m = 1; m <= 12; ++m) {
      const double bound = std::ldexp(1.0, -m - 1);
      // Grid containing every cell endpoint.
      const std::size_t grid = (std::size_t{1} << m) * 8 + 1;
      const double measured = roundtrip_error(BitEncoding::floor_midpoint(m), grid);
      double hand = 0.0;
      for (std::size_t k = 0; k < grid; ++k) {
        const double y = static_cast<double>(k) / static_cast<double>(grid - 1);
        hand = std::max(hand, std::abs(midpoint_roundtrip(y, m) - y));
      }
      if (std::abs(measured - hand) > 1e-15) o.pass = false;
      if (measured > bound + 1e-12) o.pass = false;
      worst_excess = std::max(worst_excess, measured - bound);
    }
    o.detail = "max(sup - 2^{-m-1}) = " + fmt("%.3g", worst_excess) + " (supremum attained at y=0,1)";
    return o;
  });

  report(3, "exact simulation on aligned oracles", [] {
    Outcome o;
    double worst = 0.0;
    for (int n = 0; n <= 3; ++n) {
      for (int m = 1; m <= 8; ++m) {
        std::mt19937_64 rng(77 + 31 * n + m);
        std::uniform_int_distribution<std::size_t> level(0, (std::size_t{1} << m) - 1);
        for (int trial = 0; trial < 5; ++trial) {
          std::vector<double> vals(std::size_t{1} << n);
          for (double& v : vals) v = (static_cast<double>(level(rng)) + 0.5) / std::ldexp(1.0, m);
          const SimulationError err =
              simulation_error(OracleFunction(vals), n, m, BitEncoding::floor_midpoint(m), PhaseEncoding::identity());
          worst = std::max(worst, err.measured);
        }
      }
    }
    o.pass = worst <= 1e-10;
    o.detail = "max error " + fmt("%.2e", worst);
    return o;
  });

  report(4, "query count", [] {
    Outcome o;
    int circuits = 0;
    for (int n = 0; n <= 3; ++n) {
      for (int m = 1; m <= 8; ++m) {
        const OracleFunction f1 = OracleFunction::constant(std::size_t{1} << n, 0.3);
        std::vector<double> v2(std::size_t{1} << n);
        for (std::size_t j = 0; j < v2.size(); ++j) v2[j] = 0.9 - 0.1 * static_cast<double>(j);
        const OracleFunction f2(v2);
        const auto enc = BitEncoding::floor_midpoint(m);
        const auto c1 = assemble_simulation(f1, n, m, enc, PhaseEncoding::identity());
        const auto c2 = assemble_simulation(f2, n, m, enc, PhaseEncoding::identity());
        int flagged = 0;
        for (const auto& s : c1.stages()) flagged += s.queries_f ? 1 : 0;
        if (flagged != 2 || c1.query_count() != 2) o.pass = false;
        // Unflagged stages must not depend on f.
        if (c1.layout().dim() <= 512) {
          for (std::size_t i = 0; i < c1.stages().size(); ++i) {
            if (c1.stages()[i].queries_f) continue;
            if ((c1.stages()[i].map.dense() - c2.stages()[i].map.dense()).norm() > 0.0) o.pass = false;
          }
        }
        ++circuits;
      }
    }
    o.detail = std::to_string(circuits) + " circuits, 2 f-dependent stages each";
    return o;
  });

  const auto fit_start = std::chrono::steady_clock::now();
  const RunResult trig = run_experiment(default_config(Experiment::trig_fit));
  const double fit_secs = elapsed_since(fit_start);

  report(5, "amplitude polynomial degree", [&] {
    Outcome o;
    double worst = 0.0, extremal_min = 1e300;
    int specs = 0;
    for (const auto& r : trig.rows) {
      if (r.label == "holdout-1var" || r.label == "holdout-2var") {
        ++specs;
        worst = std::max({worst, r.measured, r.analytic_ref});
        if (!r.pass) o.pass = false;
      }
    }
    const auto ext = rows_with(trig.rows, "extremal");
    for (const auto& r : ext) {
      extremal_min = std::min(extremal_min, r.measured);
      if (!r.pass) o.pass = false;
    }
    // Independent check of the extremal amplitude: cos(n_q theta) needs degree n_q.
    for (int nq = 1; nq <= 4; ++nq) {
      const AlgorithmSpec spec = sequential_phase_algorithm(nq);
      const double th[] = {0.37};
      const StateVector out = run_with_angles(spec, th);
      if (std::abs(std::abs(out[0]) - std::abs(std::cos(nq * 0.37))) > 1e-12) o.pass = false;
    }
    if (specs != 50 || ext.size() != 4 || fit_secs > 60.0) o.pass = false;
    o.detail = std::to_string(specs) + " specs, max residual " + fmt("%.2e", worst) + ", extremal degree-(n_q-1) residual >= " +
               fmt("%.3f", extremal_min);
    return o;
  });

  report(6, "success polynomial contracts", [&] {
    Outcome o;
    double range_excess = 0.0, full_dev = 0.0;
    int count = 0;
    for (const auto& r : rows_with(trig.rows, "success-range")) {
      range_excess = std::max(range_excess, r.measured);
      if (!r.pass || r.analytic_ref > r.bound) o.pass = false;
      ++count;
    }
    for (const auto& r : rows_with(trig.rows, "success-full")) {
      full_dev = std::max(full_dev, r.measured);
      if (!r.pass) o.pass = false;
    }
    if (count != 50) o.pass = false;
    o.detail = "max range excess " + fmt("%.2e", range_excess) + ", max |T_full - 1| " + fmt("%.2e", full_dev);
    return o;
  });

  report(7, "Bernstein inequality", [] {
    Outcome o;
    const RunResult res = run_experiment(default_config(Experiment::bernstein));
    double ratio = 0.0, eq = 0.0;
    int random = 0;
    for (const auto& r : res.rows) {
      if (!r.pass) o.pass = false;
      if (r.label == "random") {
        ++random;
        ratio = std::max(ratio, r.measured / r.analytic_ref);
      } else {
        eq = std::max(eq, std::abs(r.measured - r.bound));
      }
    }
    // sin(k theta): sup|t'| = k, sup|t| = 1.
    for (int k = 1; k <= 10; ++k) {
      const auto bm = bernstein_margin(TrigPoly::sine(k), bernstein_grid_size(k));
      if (std::abs(bm.max_derivative - k) > 1e-6 || std::abs(bm.bound - k) > 1e-6) o.pass = false;
    }
    if (random != 1000) o.pass = false;
    o.detail = "1000 polys, max |t'|/(deg|t|) = " + fmt("%.6f", ratio) + ", sine equality gap " + fmt("%.1e", eq);
    return o;
  });

  report(8, "sin^2 gap inequality", [] {
    Outcome o;
    double slack = 1e300;
    for (int a = 0; a < 100; ++a) {
      for (int b = 0; b < 100; ++b) {
        const double phi = (kPi / 2.0) * a / 99.0, psi = (kPi / 2.0) * b / 99.0;
        const double lhs = (2.0 / kPi) * std::abs(phi - psi);
        const double rhs = std::sqrt(2.0 * std::abs(std::sin(phi) * std::sin(phi) - std::sin(psi) * std::sin(psi)));
        slack = std::min(slack, rhs - lhs);
        const bool direct = lhs <= rhs + 1e-12;
        if (!direct || direct != sin_sq_gap_check(phi, psi)) o.pass = false;
      }
    }
    o.detail = "10^4 pairs, min(rhs - lhs) = " + fmt("%.3g", slack);
    return o;
  });

  report(9, "bit-query evaluation", [] {
    Outcome o;
    ExperimentConfig c = default_config(Experiment::evaluation);
    c.t.clear();
    const RunResult res = run_experiment(c);
    int rows = 0;
    for (const auto& r : res.rows) {
      if (r.label != "bit-query") continue;
      ++rows;
      if (!r.pass || r.analytic_ref != 1.0) o.pass = false;
    }
    // One value at the cell edge, checked by hand: |decode(encode(x)) - x| = 2^{-m-1} exactly.
    for (int m = 1; m <= 10; ++m) {
      const double x = 0.0;
      if (std::abs(midpoint_roundtrip(x, m) - x) > std::ldexp(1.0, -m - 1)) o.pass = false;
    }
    if (rows != 50) o.pass = false;
    o.detail = std::to_string(rows) + " runs with 1 query, success probability 1";
    return o;
  });

  report(10, "phase evaluation tightness", [] {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentConfig c = default_config(Experiment::evaluation);
    c.m.clear();
    const RunResult res = run_experiment(c);
    std::string spread;
    for (const auto& r : res.rows) {
      if (!r.pass) o.pass = false;
      if (r.label == "phase-ae-tightness") {
        spread += fmt("t=%g:%.2f ", *r.t, r.measured);
        if (r.measured < 0.1 || r.measured > 20.0) o.pass = false;
      }
    }
    // Independent query count: one preparation plus two per iterate.
    for (int t = 3; t <= 7; ++t) {
      if (evaluation_phase_algorithm(t).query_count() != (1 << (t + 1)) - 1) o.pass = false;
    }
    if (elapsed_since(t0) > 180.0) o.pass = false;
    o.detail = "error*n_q " + spread;
    return o;
  });

  report(11, "perturbation chain", [] {
    Outcome o;
    const RunResult res = run_experiment(default_config(Experiment::perturbation));
    double closed_gap = 0.0, ratio = 0.0;
    int eq7 = 0, eq30 = 0, chain = 0;
    for (const auto& r : res.rows) {
      if (!r.pass) o.pass = false;
      if (r.label == "query-difference") {
        const double e = *r.eps;
        const double hand = std::sqrt(2.0 - std::sqrt(1.0 + 4.0 * e) - std::sqrt(1.0 - 4.0 * e));
        const double angles = 2.0 * std::abs(std::sin((std::asin(std::sqrt(0.5)) - std::asin(std::sqrt(0.5 - 2.0 * e))) / 2.0));
        closed_gap = std::max({closed_gap, std::abs(r.measured - hand), std::abs(hand - angles)});
        ratio = std::max(ratio, r.measured / e);
        if (std::abs(r.measured - hand) > 1e-10 || r.measured > 2.1 * e) o.pass = false;
      } else if (r.label == "probability-chain") {
        ++chain;
        if (r.measured > r.bound + 1e-9) o.pass = false;
      } else if (r.label == "probability-inequality") {
        ++eq7;
      } else if (r.label == "product-inequality") {
        ++eq30;
      }
    }
    if (eq7 != 500 || eq30 != 500 || chain != 25) o.pass = false;
    o.detail = "closed-form gap " + fmt("%.1e", closed_gap) + ", max norm/eps " + fmt("%.4f", ratio) + ", " +
               std::to_string(eq7) + "+" + std::to_string(eq30) + " random instances";
    return o;
  });

  report(12, "lower-bound ingredients", [] {
    Outcome o;
    const Theorem1Report rep = theorem1_ingredient_check(evaluation_phase_algorithm(4), 1.0 / 16.0);
    const double x = 0.5 - 2.0 / 16.0, delta = 2.0 / 16.0;
    const double hand = (2.0 / (3.0 * kPi)) * (std::sqrt(1.0 / delta) + std::sqrt(x * (1.0 - x)) / delta);
    o.pass = rep.premise_met && rep.t_at_f1 >= 0.75 && rep.t_at_f2 <= 0.25 && 2.0 * rep.n_queries >= hand &&
             std::abs(rep.degree_bound - hand) <= 1e-12 && rep.bound_satisfied;
    o.detail = "T(f1)=" + fmt("%.4f", rep.t_at_f1) + " T(f2)=" + fmt("%.4f", rep.t_at_f2) + " 2n_q=" +
               std::to_string(2 * rep.n_queries) + " bound=" + fmt("%.4f", hand);
    return o;
  });

  report(13, "determinism", [] {
    Outcome o;
    std::size_t bytes = 0;
    for (Experiment e : {Experiment::sim_error, Experiment::trig_fit, Experiment::perturbation}) {
      ExperimentConfig c = default_config(e);
      c.seed = 12345;
      c.trials = 4;
      const std::string a = to_csv(run_experiment(c).rows);
      const std::string b = to_csv(run_experiment(c).rows);
      if (a != b) o.pass = false;
      bytes += a.size();
    }
    o.detail = std::to_string(bytes) + " CSV bytes identical across two runs";
    return o;
  });

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
