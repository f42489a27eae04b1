#pragma once

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tvi/baselines.hpp"
#include "tvi/csv.hpp"
#include "tvi/errors.hpp"
#include "tvi/hamiltonian_tvi.hpp"
#include "tvi/integrator_types.hpp"
#include "tvi/lagrangian_tvi.hpp"
#include "tvi/problems.hpp"
#include "tvi/quadrature.hpp"
#include "tvi/symmetric_tvi.hpp"
#include "tvi/systems.hpp"

// Experiment harness: trajectory runs with per-step diagnostics, convergence
// studies against a high-order Taylor reference, and method comparisons.
// Everything funnels through one step dispatcher so every integrator sees the
// same bookkeeping (exact t = k h time stamps, signed energy error vs row 0).

namespace tvi {

enum class Method {
  tvi,
  htvi_plus,
  htvi_minus,
  svhd,
  sym_tvi,
  taylor,
  euler_a,
  euler_b,
  stormer_verlet,
};

inline const std::vector<std::pair<Method, std::string>>& method_names() {
  static const std::vector<std::pair<Method, std::string>> table = {
      {Method::tvi, "tvi"},
      {Method::htvi_plus, "htvi_plus"},
      {Method::htvi_minus, "htvi_minus"},
      {Method::svhd, "svhd"},
      {Method::sym_tvi, "sym_tvi"},
      {Method::taylor, "taylor"},
      {Method::euler_a, "euler_a"},
      {Method::euler_b, "euler_b"},
      {Method::stormer_verlet, "stormer_verlet"},
  };
  return table;
}

inline std::string method_name(Method m) {
  for (const auto& [k, v] : method_names())
    if (k == m) return v;
  return "?";
}

inline Method method_from_string(const std::string& s) {
  for (const auto& [k, v] : method_names())
    if (v == s) return k;
  throw ConfigError("unknown method: " + s);
}

/// True for the implicit variational methods (they run Newton and honor the
/// quadrature/order settings; the closed-form baselines do not).
inline bool method_is_implicit(Method m) {
  return m == Method::tvi || m == Method::htvi_plus || m == Method::htvi_minus ||
         m == Method::svhd || m == Method::sym_tvi;
}

inline bool method_uses_order(Method m) {
  return m == Method::tvi || m == Method::htvi_plus || m == Method::htvi_minus ||
         m == Method::sym_tvi || m == Method::taylor;
}

inline bool method_uses_quadrature(Method m) {
  return m == Method::tvi || m == Method::htvi_plus || m == Method::htvi_minus ||
         m == Method::sym_tvi;
}

/// One experiment: problem, method, method parameters, step count, output.
struct RunSpec {
  std::string problem = "pendulum";
  Method method = Method::tvi;
  int r = 1;
  std::string quadrature = "trapezoid";
  double h = 0.1;
  long steps = 100;
  double tol = 1e-12;
  std::string out;                // CSV path; empty skips the file
  unsigned long long seed = 0;    // randomized initial data where applicable
  std::string data_file;          // explicit n-body table path
};

/// Compact label for comparison tables: method plus the parameters it uses.
inline std::string spec_label(const RunSpec& spec) {
  std::string s = method_name(spec.method);
  if (method_uses_order(spec.method)) s += "_r" + std::to_string(spec.r);
  if (method_uses_quadrature(spec.method)) s += "_" + spec.quadrature;
  return s;
}

struct TrajectoryRow {
  long step = 0;
  double t = 0.0;
  std::vector<double> q, p;
  double energy = 0.0;
  double energy_error = 0.0;  // signed: energy - energy(row 0)
  int newton_iters = 0;
  double residual = 0.0;
};

struct TrajectorySummary {
  double mean_abs_energy_error = 0.0;  // over the steps taken (row 0 excluded)
  double max_abs_energy_error = 0.0;
  double wall_time_s = 0.0;            // stepping loop only
  long total_newton_iters = 0;
  bool completed = true;
  long failed_step = -1;               // 1-based index of the failing step
  std::string error;
};

struct Trajectory {
  int dim = 0;
  std::vector<TrajectoryRow> rows;
  TrajectorySummary summary;
};

namespace detail {

struct StepOutcome {
  std::vector<double> q, p;
  SolveReport report;
};

template <class Sys>
StepOutcome dispatch_step(const Sys& sys, Method method, std::span<const double> q,
                          std::span<const double> p, double h, const TviConfig& cfg) {
  StepOutcome o;
  auto from_step = [&](StepResult s) {
    o.q = std::move(s.q1);
    o.p = std::move(s.p1);
    o.report = s.report;
  };
  auto from_baseline = [&](BaselineStep s) {
    o.q = std::move(s.q);
    o.p = std::move(s.p);
    o.report.converged = true;
  };
  switch (method) {
    case Method::tvi: from_step(step(sys, q, p, h, cfg)); break;
    case Method::htvi_plus: from_step(step_right(sys, q, p, h, cfg)); break;
    case Method::htvi_minus: from_step(step_left(sys, q, p, h, cfg)); break;
    case Method::svhd: from_step(svhd_step(sys, q, p, h, cfg.newton)); break;
    case Method::sym_tvi: from_step(symmetric_step(sys, q, p, h, cfg)); break;
    case Method::taylor: from_baseline(taylor_step(sys, q, p, h, cfg.r)); break;
    case Method::euler_a: from_baseline(euler_a_step(sys, q, p, h)); break;
    case Method::euler_b: from_baseline(euler_b_step(sys, q, p, h)); break;
    case Method::stormer_verlet: from_baseline(stormer_verlet_step(sys, q, p, h)); break;
  }
  return o;
}

inline TviConfig config_from_spec(const RunSpec& spec) {
  TviConfig cfg;
  cfg.r = spec.r;
  cfg.rule = rule_from_string(spec.quadrature);
  cfg.newton.tol = spec.tol;
  return cfg;
}

}  // namespace detail

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  CsvWriter w(path);
  std::vector<std::string> header = {"step", "t"};
  for (int i = 0; i < traj.dim; ++i) header.push_back("q" + std::to_string(i));
  for (int i = 0; i < traj.dim; ++i) header.push_back("p" + std::to_string(i));
  header.insert(header.end(), {"energy", "energy_error", "newton_iters", "residual"});
  w.row(header);
  for (const auto& r : traj.rows) {
    std::vector<std::string> cells;
    cells.reserve(header.size());
    cells.push_back(std::to_string(r.step));
    cells.push_back(format_double(r.t));
    for (double v : r.q) cells.push_back(format_double(v));
    for (double v : r.p) cells.push_back(format_double(v));
    cells.push_back(format_double(r.energy));
    cells.push_back(format_double(r.energy_error));
    cells.push_back(std::to_string(r.newton_iters));
    cells.push_back(format_double(r.residual));
    w.row(cells);
  }
  w.close();
}

/// Run the configured method for spec.steps steps.  A Newton failure
/// truncates the trajectory and is reported in the summary instead of
/// propagating; configuration problems (unknown problem, incompatible
/// method/rule, bad h) throw.
inline Trajectory run_trajectory(const RunSpec& spec) {
  if (!(spec.h > 0.0)) throw ConfigError("run: h must be positive");
  if (spec.steps < 1) throw ConfigError("run: need at least one step");
  ProblemOptions popts;
  popts.seed = spec.seed;
  popts.data_file = spec.data_file;
  ProblemInstance pi = make_problem(spec.problem, popts);
  const TviConfig cfg = detail::config_from_spec(spec);

  Trajectory traj;
  traj.dim = pi.dim();
  std::vector<double> q = pi.q0, p = pi.p0;
  const double e0 = problem_energy(pi, q, p);

  TrajectoryRow row0;
  row0.q = q;
  row0.p = p;
  row0.energy = e0;
  traj.rows.push_back(row0);

  auto t_start = std::chrono::steady_clock::now();
  for (long k = 1; k <= spec.steps; ++k) {
    detail::StepOutcome o;
    try {
      o = std::visit(
          [&](const auto& sys) {
            return detail::dispatch_step(sys, spec.method, std::span<const double>(q),
                                         std::span<const double>(p), spec.h, cfg);
          },
          pi.system);
    } catch (const ConvergenceError& e) {
      traj.summary.completed = false;
      traj.summary.failed_step = k;
      traj.summary.error = e.what();
      break;
    } catch (const SingularMatrixError& e) {
      traj.summary.completed = false;
      traj.summary.failed_step = k;
      traj.summary.error = e.what();
      break;
    }
    q = std::move(o.q);
    p = std::move(o.p);
    TrajectoryRow row;
    row.step = k;
    row.t = static_cast<double>(k) * spec.h;
    row.q = q;
    row.p = p;
    row.energy = problem_energy(pi, q, p);
    row.energy_error = row.energy - e0;
    row.newton_iters = o.report.iterations;
    row.residual = o.report.final_residual;
    traj.rows.push_back(std::move(row));
  }
  auto t_end = std::chrono::steady_clock::now();
  traj.summary.wall_time_s = std::chrono::duration<double>(t_end - t_start).count();

  for (std::size_t k = 1; k < traj.rows.size(); ++k) {
    const auto& r = traj.rows[k];
    traj.summary.mean_abs_energy_error += std::abs(r.energy_error);
    traj.summary.max_abs_energy_error =
        std::max(traj.summary.max_abs_energy_error, std::abs(r.energy_error));
    traj.summary.total_newton_iters += r.newton_iters;
  }
  if (traj.rows.size() > 1)
    traj.summary.mean_abs_energy_error /= static_cast<double>(traj.rows.size() - 1);

  if (!spec.out.empty()) write_trajectory_csv(spec.out, traj);
  return traj;
}

// --- convergence study --------------------------------------------------------

struct ConvergencePoint {
  double h = 0.0;
  double global_error = 0.0;  // phase-space inf-norm against the reference at T
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  double slope = 0.0;  // least-squares slope of log error vs log h
};

namespace detail {

inline long steps_for(double tmax, double h) {
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  if (!(tmax > 0.0)) throw ConfigError("tmax must be positive");
  const double ratio = tmax / h;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("h does not divide tmax");
  return n;
}

/// Last state of a trajectory as one flat phase-space vector.
inline std::vector<double> final_state(const Trajectory& traj) {
  const auto& r = traj.rows.back();
  std::vector<double> x = r.q;
  x.insert(x.end(), r.p.begin(), r.p.end());
  return x;
}

/// Reference endpoint state: Taylor method of order ref_order at a step at
/// most h_floor/20.
inline std::vector<double> reference_state(const RunSpec& base, double tmax, double h_floor,
                                           int ref_order) {
  RunSpec ref = base;
  ref.method = Method::taylor;
  ref.r = ref_order;
  ref.steps = static_cast<long>(std::ceil(20.0 * tmax / h_floor - 1e-9));
  ref.h = tmax / static_cast<double>(ref.steps);
  ref.out.clear();
  Trajectory traj = run_trajectory(ref);
  if (!traj.summary.completed)
    throw ConvergenceError("reference run failed: " + traj.summary.error, {}, {});
  return final_state(traj);
}

}  // namespace detail

/// Least-squares slope of log(err) vs log(h).  NaN when any error is not a
/// positive finite number (e.g. an exactly integrated problem).
inline double loglog_slope(const std::vector<ConvergencePoint>& pts) {
  const std::size_t m = pts.size();
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(pts[i].global_error > 0.0) || !std::isfinite(pts[i].global_error))
      return std::numeric_limits<double>::quiet_NaN();
    x[i] = std::log(pts[i].h);
    y[i] = std::log(pts[i].global_error);
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<double>(m);
  ym /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  return sxy / sxx;
}

/// Global error of base's method at a fixed final time T = tmax for each h,
/// measured in the phase-space inf-norm against a Taylor reference run at
/// h_ref <= min(h)/20.  base.h/base.steps/base.out are ignored.
inline ConvergenceResult convergence_study(const RunSpec& base, const std::vector<double>& hs,
                                           double tmax, int ref_order = 8) {
  if (hs.empty()) throw ConfigError("converge: need at least one h");
  double h_min = hs[0];
  for (double h : hs) {
    detail::steps_for(tmax, h);  // validates divisibility up front
    h_min = std::min(h_min, h);
  }
  std::vector<double> ref = detail::reference_state(base, tmax, h_min, ref_order);

  ConvergenceResult out;
  for (double h : hs) {
    RunSpec spec = base;
    spec.h = h;
    spec.steps = detail::steps_for(tmax, h);
    spec.out.clear();
    Trajectory traj = run_trajectory(spec);
    if (!traj.summary.completed)
      throw ConvergenceError("convergence run failed at h = " + format_double(h) + ": " +
                                 traj.summary.error,
                             {}, {});
    std::vector<double> x = detail::final_state(traj);
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x[i] - ref[i]));
    out.points.push_back({h, err});
  }
  out.slope = loglog_slope(out.points);
  return out;
}

inline void write_convergence_csv(const std::string& path, const ConvergenceResult& res) {
  CsvWriter w(path);
  w.row({"h", "global_error"});
  for (const auto& p : res.points) w.numeric_row({p.h, p.global_error});
  w.comment("slope=" + format_double(res.slope));
  w.close();
}

// --- method comparison --------------------------------------------------------

struct CompareRow {
  std::string method;  // spec label
  double h = 0.0;
  double mean_energy_error = 0.0;
  double global_error = 0.0;
  double wall_time_s = 0.0;
  std::string status;  // "ok" or the failure message
};

/// One row per spec: mean |energy error|, global error at T against a shared
/// Taylor reference, wall time around the stepping loop.  A failing spec gets
/// an error status and NaN global error; the other rows still run.
inline std::vector<CompareRow> compare_methods(const std::vector<RunSpec>& specs, double tmax,
                                               int ref_order = 8) {
  if (specs.empty()) throw ConfigError("compare: need at least one spec");
  double h_min = specs[0].h;
  for (const auto& s : specs) {
    if (s.problem != specs[0].problem)
      throw ConfigError("compare: all specs must use the same problem");
    detail::steps_for(tmax, s.h);
    h_min = std::min(h_min, s.h);
  }
  std::vector<double> ref = detail::reference_state(specs[0], tmax, h_min, ref_order);

  std::vector<CompareRow> rows;
  for (const auto& base : specs) {
    RunSpec spec = base;
    spec.steps = detail::steps_for(tmax, spec.h);
    spec.out.clear();
    CompareRow row;
    row.method = spec_label(spec);
    row.h = spec.h;
    Trajectory traj = run_trajectory(spec);
    row.mean_energy_error = traj.summary.mean_abs_energy_error;
    row.wall_time_s = traj.summary.wall_time_s;
    if (traj.summary.completed) {
      std::vector<double> x = detail::final_state(traj);
      double err = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x[i] - ref[i]));
      row.global_error = err;
      row.status = "ok";
    } else {
      row.global_error = std::numeric_limits<double>::quiet_NaN();
      row.status = "failed at step " + std::to_string(traj.summary.failed_step);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_compare_csv(const std::string& path, const std::vector<CompareRow>& rows) {
  CsvWriter w(path);
  w.row({"method", "h", "mean_energy_error", "global_error", "wall_time_s", "status"});
  for (const auto& r : rows)
    w.row({r.method, format_double(r.h), format_double(r.mean_energy_error),
           format_double(r.global_error), format_double(r.wall_time_s), r.status});
  w.close();
}

}  // namespace tvi
