#include "qquery/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "qquery/errors.hpp"
#include "qquery/experiments.hpp"
#include "qquery/phase_from_bit.hpp"
#include "qquery/trigpoly.hpp"

namespace qquery {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::sim_error, "sim-error"},   {Experiment::trig_fit, "trig-fit"},
      {Experiment::bernstein, "bernstein"},   {Experiment::evaluation, "evaluation"},
      {Experiment::mean, "mean"},             {Experiment::perturbation, "perturbation"},
      {Experiment::theorem1, "theorem1"},
  };
  return names;
}

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

// Independent generator per task, keyed by the task's parameters.
std::mt19937_64 task_rng(std::int64_t seed, Experiment e, std::initializer_list<int> key) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed & 0xffffffff),
                                   static_cast<std::uint32_t>((static_cast<std::uint64_t>(seed) >> 32) & 0xffffffff),
                                   static_cast<std::uint32_t>(e)};
  for (int k : key) words.push_back(static_cast<std::uint32_t>(k));
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Task = std::function<std::vector<ResultRow>()>;

ResultRow row(Experiment e, std::string label) {
  ResultRow r;
  r.experiment = to_string(e);
  r.label = std::move(label);
  return r;
}

// ---------------------------------------------------------------- per-experiment tasks

std::vector<Task> sim_error_tasks(const ExperimentConfig& c, int trials) {
  std::vector<Task> tasks;
  const PhaseEncoding beta = PhaseEncoding::parse(c.phase_encoding);
  for (int n : c.n) {
    for (int m : c.m) {
      for (int trial = 0; trial < trials; ++trial) {
        tasks.push_back([=, seed = c.seed] {
          auto rng = task_rng(seed, Experiment::sim_error, {n, m, trial});
          std::uniform_real_distribution<double> u(0.0, 1.0);
          std::vector<double> values(std::size_t{1} << n);
          for (double& v : values) v = u(rng);
          const OracleFunction f(values);
          const BitEncoding enc = BitEncoding::floor_midpoint(m);
          const SimulationError err = simulation_error(f, n, m, enc, beta);
          const SimulationCircuit circuit = assemble_simulation(f, n, m, enc, beta);

          ResultRow r = row(Experiment::sim_error, "random-oracle");
          r.n = n;
          r.m = m;
          r.trial = trial;
          r.measured = err.measured;
          r.analytic_ref = err.analytic_reference;
          r.bound = err.bound;
          const bool bound_ok = std::isnan(err.bound) || err.measured <= err.bound + 1e-12;
          r.pass = bound_ok && std::abs(err.measured - err.analytic_reference) <= 1e-9 && err.ancilla_leak <= 1e-12 &&
                   circuit.query_count() == 2;
          return std::vector<ResultRow>{r};
        });
      }
    }
  }
  return tasks;
}

std::vector<Task> trig_fit_tasks(const ExperimentConfig& c, int trials) {
  std::vector<Task> tasks;
  for (int trial = 0; trial < trials; ++trial) {
    const int nq = c.nq[static_cast<std::size_t>(trial) % c.nq.size()];
    tasks.push_back([=, seed = c.seed] {
      auto rng = task_rng(seed, Experiment::trig_fit, {nq, trial});
      const int index_qubits = trial % 2;
      const int work = 2 - index_qubits + ((trial / 2) % 2);
      const AlgorithmSpec spec = random_phase_algorithm(nq, index_qubits, work, rng);
      const FitReport fit = amplitude_polynomials(spec, nq);
      std::vector<ResultRow> rows;

      ResultRow holdout = row(Experiment::trig_fit, index_qubits == 0 ? "holdout-1var" : "holdout-2var");
      holdout.trial = trial;
      holdout.t = nq;
      holdout.measured = fit.holdout_residual;
      holdout.analytic_ref = fit.fit_residual;
      holdout.bound = 1e-6;
      holdout.pass = fit.holdout_residual <= 1e-6 && fit.fit_residual <= 1e-6;
      rows.push_back(holdout);

      // Success polynomial of a random outcome subset and of all outcomes.
      std::bernoulli_distribution coin(0.5);
      std::vector<std::size_t> kept, all;
      for (std::size_t k = 0; k < spec.layout().dim(); ++k) {
        all.push_back(k);
        if (coin(rng)) kept.push_back(k);
      }
      const TrigPoly sub = success_polynomial(fit, kept);
      const TrigPoly full = success_polynomial(fit, all);
      const int n_vars = sub.n_vars();
      double lo = std::numeric_limits<double>::infinity(), hi = -lo, full_dev = 0.0;
      const std::size_t side = n_vars == 1 ? 4096 : 64;
      for (std::size_t a = 0; a < side; ++a) {
        for (std::size_t b = 0; b < (n_vars == 1 ? 1 : side); ++b) {
          std::vector<double> th{2.0 * kPi * static_cast<double>(a) / static_cast<double>(side)};
          if (n_vars == 2) th.push_back(2.0 * kPi * static_cast<double>(b) / static_cast<double>(side));
          const double v = sub.evaluate(th).real();
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          full_dev = std::max(full_dev, std::abs(full.evaluate(th) - 1.0));
        }
      }
      ResultRow range_row = row(Experiment::trig_fit, "success-range");
      range_row.trial = trial;
      range_row.t = nq;
      range_row.measured = std::max(-lo, hi - 1.0);
      range_row.analytic_ref = sub.pruned(1e-9).degree();
      range_row.bound = 2.0 * nq;
      range_row.pass = lo >= -1e-9 && hi <= 1.0 + 1e-9 && sub.degree() <= 2 * nq;
      rows.push_back(range_row);

      ResultRow full_row = row(Experiment::trig_fit, "success-full");
      full_row.trial = trial;
      full_row.t = nq;
      full_row.measured = full_dev;
      full_row.analytic_ref = 1.0;
      full_row.bound = 1e-9;
      full_row.pass = full_dev <= 1e-9;
      rows.push_back(full_row);
      return rows;
    });
  }
  for (int nq : c.nq) {
    tasks.push_back([=] {
      const AlgorithmSpec spec = sequential_phase_algorithm(nq);
      const FitReport below = amplitude_polynomials(spec, nq - 1);
      const FitReport exact = amplitude_polynomials(spec, nq);
      ResultRow r = row(Experiment::trig_fit, "extremal");
      r.t = nq;
      r.measured = std::max(below.fit_residual, below.holdout_residual);
      r.analytic_ref = std::max(exact.fit_residual, exact.holdout_residual);
      r.bound = 1e-2;
      r.pass = r.measured > 1e-2 && r.analytic_ref <= 1e-6;
      return std::vector<ResultRow>{r};
    });
  }
  return tasks;
}

std::vector<Task> bernstein_tasks(const ExperimentConfig& c, int trials) {
  std::vector<Task> tasks;
  for (int trial = 0; trial < trials; ++trial) {
    tasks.push_back([=, seed = c.seed] {
      auto rng = task_rng(seed, Experiment::bernstein, {trial});
      std::uniform_int_distribution<int> deg_dist(1, 10);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const int d = deg_dist(rng);
      TrigPoly t(1);
      for (int k = -d; k <= d; ++k) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        t.add_term(Complex(re, im), {k});
      }
      const BernsteinMargin bm = bernstein_margin(t, bernstein_grid_size(t.degree()));
      ResultRow r = row(Experiment::bernstein, "random");
      r.trial = trial;
      r.t = t.degree();
      r.measured = bm.max_derivative;
      r.analytic_ref = bm.bound;
      r.bound = bm.bound * (1.0 + 1e-3);
      r.pass = bm.max_derivative <= r.bound;
      return std::vector<ResultRow>{r};
    });
  }
  for (int k = 1; k <= 10; ++k) {
    tasks.push_back([=] {
      const TrigPoly s = TrigPoly::sine(k);
      const BernsteinMargin bm = bernstein_margin(s, bernstein_grid_size(k));
      ResultRow r = row(Experiment::bernstein, "sine-equality");
      r.t = k;
      r.measured = bm.max_derivative;
      r.analytic_ref = bm.bound;
      r.bound = static_cast<double>(k);
      r.pass = std::abs(bm.max_derivative - bm.bound) <= 1e-6 && std::abs(bm.bound - k) <= 1e-6;
      return std::vector<ResultRow>{r};
    });
  }
  return tasks;
}

const std::vector<double>& evaluation_points() {
  static const std::vector<double> pts = {0.1, 0.3, 0.5, 0.7, 0.9};
  return pts;
}

std::vector<Task> evaluation_tasks(const ExperimentConfig& c, int trials) {
  std::vector<Task> tasks;
  for (int m : c.m) {
    for (int trial = 0; trial < trials; ++trial) {
      tasks.push_back([=, seed = c.seed] {
        auto rng = task_rng(seed, Experiment::evaluation, {m, trial});
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double f0 = trial == 0 ? 0.0 : (trial == 1 ? 1.0 : u(rng));
        const AlgorithmSpec spec = evaluation_bit_algorithm(m);
        const double eps = std::ldexp(1.0, -m - 1) + 1e-12;
        const double p = success_probability(spec, OracleFunction({f0}), evaluation_problem(eps));
        ResultRow r = row(Experiment::evaluation, "bit-query");
        r.m = m;
        r.eps = eps;
        r.trial = trial;
        r.measured = p;
        r.analytic_ref = spec.query_count();
        r.bound = 1.0;
        r.pass = std::abs(p - 1.0) <= 1e-12 && spec.query_count() == 1;
        return std::vector<ResultRow>{r};
      });
    }
  }
  for (int t : c.t) {
    tasks.push_back([=] {
      const AlgorithmSpec spec = evaluation_phase_algorithm(t);
      const int nq = spec.query_count();
      std::vector<ResultRow> rows;
      double worst = 0.0;
      for (std::size_t i = 0; i < evaluation_points().size(); ++i) {
        const double f0 = evaluation_points()[i];
        const StateVector out = run_algorithm(spec, OracleFunction({f0}));
        const ErrorDistribution dist = error_distribution(spec, out.amplitudes(), f0);
        const double err = dist.quantile(0.75);
        const double bound = amplitude_estimation_bound(f0, t);
        worst = std::max(worst, err);
        ResultRow r = row(Experiment::evaluation, "phase-ae");
        r.t = t;
        r.eps = f0;
        r.trial = static_cast<int>(i);
        r.measured = err;
        r.analytic_ref = dist.probability_within(bound);
        r.bound = bound;
        r.pass = err <= bound && dist.probability_within(bound) >= 8.0 / (kPi * kPi) - 1e-12 &&
                 std::abs(out.norm() - 1.0) <= 1e-10;
        rows.push_back(r);
      }
      ResultRow tight = row(Experiment::evaluation, "phase-ae-tightness");
      tight.t = t;
      tight.measured = worst * nq;
      tight.analytic_ref = worst;
      tight.bound = 20.0;
      tight.pass = tight.measured >= 0.1 && tight.measured <= 20.0;
      rows.push_back(tight);
      return rows;
    });
  }
  return tasks;
}

std::vector<Task> mean_tasks(const ExperimentConfig& c, int trials) {
  std::vector<Task> tasks;
  for (int n : c.n) {
    for (int t : c.t) {
      for (int trial = 0; trial < trials; ++trial) {
        tasks.push_back([=, seed = c.seed] {
          auto rng = task_rng(seed, Experiment::mean, {n, t, trial});
          std::uniform_real_distribution<double> u(0.0, 1.0);
          std::vector<double> values(std::size_t{1} << n);
          for (double& v : values) v = u(rng);
          const OracleFunction f(values);
          const AlgorithmSpec spec = mean_estimation_algorithm(n, t);
          const double target = mean_problem(0.0).solution(f);
          const StateVector out = run_algorithm(spec, f);
          const ErrorDistribution dist = error_distribution(spec, out.amplitudes(), target);
          const double bound = amplitude_estimation_bound(target, t);
          ResultRow r = row(Experiment::mean, "mean-ae");
          r.n = n;
          r.t = t;
          r.trial = trial;
          r.measured = dist.quantile(0.75);
          r.analytic_ref = target;
          r.bound = bound;
          r.pass = r.measured <= bound && std::abs(out.norm() - 1.0) <= 1e-10;
          return std::vector<ResultRow>{r};
        });
      }
    }
  }
  return tasks;
}

std::vector<Task> perturbation_tasks(const ExperimentConfig& c, int trials) {
  std::vector<Task> tasks;
  for (double eps : c.eps) {
    tasks.push_back([=] {
      const OracleFunction f1({0.5});
      const OracleFunction f2({0.5 - 2.0 * eps});
      const QueryDifference qd = query_difference_norm(f1, f2, QueryModel::phase);
      ResultRow r = row(Experiment::perturbation, "query-difference");
      r.eps = eps;
      r.measured = qd.norm;
      r.analytic_ref = perturbation_closed_form(eps);
      r.bound = 2.1 * eps;
      r.pass = std::abs(qd.norm - r.analytic_ref) <= 1e-10 && std::abs(qd.norm - qd.block_formula) <= 1e-10 &&
               qd.norm <= r.bound;
      return std::vector<ResultRow>{r};
    });
    for (int t : c.t) {
      tasks.push_back([=] {
        const AlgorithmSpec spec = evaluation_phase_algorithm(t);
        const OracleFunction f1({0.5});
        const OracleFunction f2({0.5 - 2.0 * eps});
        const auto kept = [&spec, eps](std::size_t k) { return std::abs(spec.solution(k) - 0.5) < eps; };
        const PerturbationCheck pc = probability_perturbation_check(spec, f1, f2, kept);
        ResultRow r = row(Experiment::perturbation, "probability-chain");
        r.eps = eps;
        r.t = t;
        r.measured = pc.lhs;
        r.analytic_ref = pc.middle;
        r.bound = pc.rhs;
        const bool middle_ok = std::isnan(pc.middle) || (pc.lhs <= pc.middle + 1e-9 && pc.middle <= pc.rhs + 1e-9);
        r.pass = pc.holds(1e-9) && middle_ok;
        return std::vector<ResultRow>{r};
      });
    }
  }
  for (int trial = 0; trial < trials; ++trial) {
    tasks.push_back([=, seed = c.seed] {
      auto rng = task_rng(seed, Experiment::perturbation, {trial});
      const std::size_t dim = std::size_t{2} << (trial % 4);
      const InequalityInstance p = random_probability_instance(dim, rng);
      const InequalityInstance q = random_product_instance(8, rng);
      ResultRow a = row(Experiment::perturbation, "probability-inequality");
      a.trial = trial;
      a.measured = p.lhs;
      a.bound = p.rhs;
      a.analytic_ref = static_cast<double>(dim);
      a.pass = p.lhs <= p.rhs + 1e-9;
      ResultRow b = row(Experiment::perturbation, "product-inequality");
      b.trial = trial;
      b.measured = q.lhs;
      b.bound = q.rhs;
      b.analytic_ref = 8.0;
      b.pass = q.lhs <= q.rhs + 1e-9;
      return std::vector<ResultRow>{a, b};
    });
  }
  return tasks;
}

std::vector<Task> theorem1_tasks(const ExperimentConfig& c) {
  std::vector<Task> tasks;
  for (int t : c.t) {
    for (double eps : c.eps) {
      tasks.push_back([=] {
        const AlgorithmSpec spec = evaluation_phase_algorithm(t);
        const Theorem1Report rep = theorem1_ingredient_check(spec, eps);
        std::vector<ResultRow> rows;
        ResultRow r = row(Experiment::theorem1, rep.premise_met ? "degree-bound" : "premise-unmet");
        r.t = t;
        r.eps = eps;
        r.measured = 2.0 * rep.n_queries;
        r.analytic_ref = rep.fitted_degree;
        r.bound = rep.degree_bound;
        r.pass = !rep.premise_met ||
                 (rep.bound_satisfied && rep.fitted_degree >= rep.degree_bound && rep.fitted_degree <= 2 * rep.n_queries &&
                  rep.t_min >= -1e-9 && rep.t_max <= 1.0 + 1e-9);
        rows.push_back(r);
        if (rep.premise_met) {
          ResultRow hi = row(Experiment::theorem1, "T(f1)>=3/4");
          hi.t = t;
          hi.eps = eps;
          hi.measured = rep.t_at_f1;
          hi.analytic_ref = rep.success_f1;
          hi.bound = 0.75;
          hi.pass = rep.t_at_f1 >= 0.75 && std::abs(rep.t_at_f1 - rep.success_f1) <= 1e-8;
          ResultRow lo = row(Experiment::theorem1, "T(f2)<=1/4");
          lo.t = t;
          lo.eps = eps;
          lo.measured = rep.t_at_f2;
          lo.analytic_ref = rep.success_f2;
          lo.bound = 0.25;
          lo.pass = rep.t_at_f2 <= 0.25 && std::abs(rep.t_at_f2 - rep.success_f2) <= 1e-8;
          rows.push_back(hi);
          rows.push_back(lo);
        }
        return rows;
      });
    }
  }
  return tasks;
}

std::vector<ResultRow> run_tasks(const std::vector<Task>& tasks) {
  std::vector<std::vector<ResultRow>> results(tasks.size());
  const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = tasks[i]();
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = tasks[i]();
      }));
    }
    for (auto& f : pool) f.get();
  }
  // Task order is the parameter order, so concatenation is deterministic.
  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

}  // namespace

// ---------------------------------------------------------------- names

std::string to_string(Experiment e) {
  for (const auto& [k, name] : experiment_names()) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [k, n] : experiment_names()) {
    if (n == name) return k;
  }
  throw ContractError("unknown experiment '" + name +
                      "' (expected sim-error|trig-fit|bernstein|evaluation|mean|perturbation|theorem1)");
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ContractError("unknown format '" + name + "' (expected csv|json)");
}

// ---------------------------------------------------------------- config

int default_trials(Experiment e) {
  switch (e) {
    case Experiment::sim_error:
      return 20;
    case Experiment::trig_fit:
      return 50;
    case Experiment::bernstein:
      return 1000;
    case Experiment::evaluation:
      return 5;
    case Experiment::mean:
      return 5;
    case Experiment::perturbation:
      return 500;
    case Experiment::theorem1:
      return 1;
  }
  return 1;
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::sim_error:
      c.n = range(0, 3);
      c.m = range(1, 8);
      break;
    case Experiment::trig_fit:
      c.nq = range(1, 4);
      break;
    case Experiment::bernstein:
      break;
    case Experiment::evaluation:
      c.m = range(1, 10);
      c.t = range(3, 7);
      break;
    case Experiment::mean:
      c.n = range(1, 2);
      c.t = range(3, 5);
      break;
    case Experiment::perturbation:
      c.t = range(3, 7);
      for (int k = 3; k <= 7; ++k) c.eps.push_back(std::ldexp(1.0, -k));
      break;
    case Experiment::theorem1:
      c.t = {4};
      c.eps = {1.0 / 16.0};
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ContractError("config file must hold a JSON object");
  ExperimentConfig c = default_config(parse_experiment(j.value("experiment", std::string("sim-error"))));
  if (j.contains("n")) c.n = j.at("n").get<std::vector<int>>();
  if (j.contains("m")) c.m = j.at("m").get<std::vector<int>>();
  if (j.contains("t")) c.t = j.at("t").get<std::vector<int>>();
  if (j.contains("eps")) c.eps = j.at("eps").get<std::vector<double>>();
  if (j.contains("nq")) c.nq = j.at("nq").get<std::vector<int>>();
  if (j.contains("trials")) c.trials = j.at("trials").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::int64_t>();
  if (j.contains("phase_encoding")) c.phase_encoding = j.at("phase_encoding").get<std::string>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  return c;
}

std::vector<Violation> validate(const ExperimentConfig& c) {
  std::vector<Violation> v;
  auto usage = [&v](std::string field, std::string msg) {
    v.push_back({Violation::Kind::usage, std::move(field), std::move(msg)});
  };
  auto resource = [&v](std::string field, std::string msg) {
    v.push_back({Violation::Kind::resource, std::move(field), std::move(msg)});
  };
  auto check_ints = [&](const std::vector<int>& vals, const char* field, int lo, int budget, bool needed) {
    if (needed && vals.empty()) usage(field, std::string(field) + " range is empty");
    for (int x : vals) {
      if (x < lo) usage(field, std::string(field) + " = " + std::to_string(x) + " below minimum " + std::to_string(lo));
      if (x > budget) {
        resource(field, std::string(field) + " exceeds budget " + std::to_string(budget) + " (got " + std::to_string(x) + ")");
      }
    }
  };

  const Experiment e = c.experiment;
  check_ints(c.n, "n", e == Experiment::mean ? 1 : 0, kMaxIndexQubits, e == Experiment::sim_error || e == Experiment::mean);
  const bool eval_empty = e == Experiment::evaluation && c.m.empty() && c.t.empty();
  check_ints(c.m, "m", 1, kMaxValueQubits, e == Experiment::sim_error || eval_empty);
  check_ints(c.t, "t", 1, kMaxPrecisionQubits,
             e == Experiment::mean || e == Experiment::perturbation ||
                 e == Experiment::theorem1);
  check_ints(c.nq, "nq", 1, kMaxFitQueries, e == Experiment::trig_fit);
  if ((e == Experiment::perturbation || e == Experiment::theorem1) && c.eps.empty()) usage("eps", "eps range is empty");
  for (double x : c.eps) {
    if (!(x > 0.0 && x < 0.25)) usage("eps", "eps = " + format_double(x) + " outside (0, 1/4)");
  }
  if (e == Experiment::sim_error) {
    for (int n : c.n) {
      for (int m : c.m) {
        if (2 * n + m + 1 > 24) resource("m", "circuit with n=" + std::to_string(n) + ", m=" + std::to_string(m) + " exceeds 2^24");
      }
    }
  }
  if (c.trials && *c.trials < 1) usage("trials", "trials must be positive");
  if (c.seed < 0) usage("seed", "seed must be non-negative");
  if (c.phase_encoding != "identity" && c.phase_encoding != "id" && c.phase_encoding != "square") {
    usage("phase_encoding", "unknown phase encoding '" + c.phase_encoding + "'");
  }
  return v;
}

// ---------------------------------------------------------------- run

bool RunResult::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.pass; });
}

RunResult run_experiment(const ExperimentConfig& c) {
  const auto violations = validate(c);
  for (const auto& v : violations) {
    if (v.kind == Violation::Kind::resource) throw ResourceError(v.field + ": " + v.message);
  }
  if (!violations.empty()) throw ContractError(violations.front().field + ": " + violations.front().message);

  const int trials = c.trials.value_or(default_trials(c.experiment));
  std::vector<Task> tasks;
  switch (c.experiment) {
    case Experiment::sim_error:
      tasks = sim_error_tasks(c, trials);
      break;
    case Experiment::trig_fit:
      tasks = trig_fit_tasks(c, trials);
      break;
    case Experiment::bernstein:
      tasks = bernstein_tasks(c, trials);
      break;
    case Experiment::evaluation:
      tasks = evaluation_tasks(c, trials);
      break;
    case Experiment::mean:
      tasks = mean_tasks(c, trials);
      break;
    case Experiment::perturbation:
      tasks = perturbation_tasks(c, trials);
      break;
    case Experiment::theorem1:
      tasks = theorem1_tasks(c);
      break;
  }
  return RunResult{run_tasks(tasks)};
}

std::string csv_header() { return "experiment,case,n,m,t,eps,trial,measured,analytic_ref,paper_bound,pass"; }

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << csv_header() << '\n';
  auto opt_int = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.label << ',' << opt_int(r.n) << ',' << opt_int(r.m) << ',' << opt_int(r.t) << ','
        << (r.eps ? format_double(*r.eps) : std::string()) << ',' << opt_int(r.trial) << ',' << format_double(r.measured)
        << ',' << format_double(r.analytic_ref) << ',' << format_double(r.bound) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const ExperimentConfig& c, const RunResult& result) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::json rows = nlohmann::json::array();
  std::size_t passed = 0;
  for (const auto& r : result.rows) {
    nlohmann::json params = nlohmann::json::object();
    if (r.n) params["n"] = *r.n;
    if (r.m) params["m"] = *r.m;
    if (r.t) params["t"] = *r.t;
    if (r.eps) params["eps"] = *r.eps;
    if (r.trial) params["trial"] = *r.trial;
    rows.push_back({{"experiment", r.experiment},
                    {"case", r.label},
                    {"parameters", params},
                    {"measured", num(r.measured)},
                    {"analytic_ref", num(r.analytic_ref)},
                    {"bound", num(r.bound)},
                    {"pass", r.pass}});
    if (r.pass) ++passed;
  }
  nlohmann::json cfg = {{"experiment", to_string(c.experiment)},
                        {"n", c.n},
                        {"m", c.m},
                        {"t", c.t},
                        {"eps", c.eps},
                        {"nq", c.nq},
                        {"trials", c.trials.value_or(default_trials(c.experiment))},
                        {"seed", c.seed},
                        {"phase_encoding", c.phase_encoding}};
  return {{"experiment", to_string(c.experiment)},
          {"config", cfg},
          {"rows", rows},
          {"summary", {{"rows", result.rows.size()}, {"passed", passed}, {"all_pass", result.all_pass()}}}};
}

int run(const ExperimentConfig& config, std::string* error_message) {
  auto fail = [error_message](int code, const std::string& msg) {
    if (error_message) *error_message = msg;
    return code;
  };
  const auto violations = validate(config);
  if (!violations.empty()) {
    std::string msg;
    bool resource_only = true;
    for (const auto& v : violations) {
      msg += v.field + ": " + v.message + "\n";
      if (v.kind != Violation::Kind::resource) resource_only = false;
    }
    return fail(resource_only ? kExitResource : kExitUsage, msg);
  }

  RunResult result;
  try {
    result = run_experiment(config);
  } catch (const ResourceError& e) {
    return fail(kExitResource, e.what());
  } catch (const ContractError& e) {
    return fail(kExitUsage, e.what());
  }

  const std::string body = config.format == OutputFormat::csv ? to_csv(result.rows) : to_json(config, result).dump(2) + "\n";
  std::string path = config.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("QQUERY_OUT_DIR"); dir && *dir) {
      path = (std::filesystem::path(dir) / (to_string(config.experiment) + (config.format == OutputFormat::csv ? ".csv" : ".json"))).string();
    }
  }
  if (path.empty()) {
    std::cout << body;
  } else {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(path, std::ios::binary);
    if (!f) return fail(kExitUsage, "cannot open output file " + path);
    f << body;
  }
  return result.all_pass() ? kExitPass : kExitViolation;
}

}  // namespace qquery
