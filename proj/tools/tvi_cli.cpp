// Experiment harness CLI: trajectory runs, convergence studies, method
// comparisons, and static SVG plots on top of the tvi library.
//
// Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
// 4 I/O error.

#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tvi/errors.hpp"
#include "tvi/harness.hpp"
#include "tvi/svg.hpp"

namespace {

void print_summary(const tvi::RunSpec& spec, const tvi::Trajectory& traj) {
  std::printf("problem=%s method=%s", spec.problem.c_str(),
              tvi::method_name(spec.method).c_str());
  if (tvi::method_uses_order(spec.method)) std::printf(" r=%d", spec.r);
  if (tvi::method_uses_quadrature(spec.method))
    std::printf(" quadrature=%s", spec.quadrature.c_str());
  std::printf(" h=%g steps=%ld\n", spec.h, spec.steps);
  const auto& s = traj.summary;
  std::printf("steps completed: %zu of %ld\n", traj.rows.size() - 1, spec.steps);
  std::printf("mean |energy error| = %.6g   max |energy error| = %.6g\n",
              s.mean_abs_energy_error, s.max_abs_energy_error);
  std::printf("total newton iterations = %ld   wall time = %.6g s\n", s.total_newton_iters,
              s.wall_time_s);
  if (!s.completed)
    std::printf("step %ld did not converge: %s\n", s.failed_step, s.error.c_str());
  if (!spec.out.empty()) std::printf("wrote %s\n", spec.out.c_str());
}

/// Compare specs are "method[:r[:quadrature[:h]]]" with empty fields keeping
/// the defaults from the shared flags, e.g. "tvi:3:gauss2", "taylor:6::0.5".
tvi::RunSpec parse_compare_spec(const std::string& text, const tvi::RunSpec& defaults) {
  std::vector<std::string> f;
  std::string cell;
  std::istringstream ss(text);
  while (std::getline(ss, cell, ':')) f.push_back(cell);
  if (f.empty() || f[0].empty()) throw tvi::ConfigError("empty compare spec: '" + text + "'");
  if (f.size() > 4)
    throw tvi::ConfigError("compare spec has too many fields: '" + text + "'");
  tvi::RunSpec spec = defaults;
  spec.method = tvi::method_from_string(f[0]);
  try {
    if (f.size() > 1 && !f[1].empty()) spec.r = std::stoi(f[1]);
    if (f.size() > 2 && !f[2].empty()) spec.quadrature = f[2];
    if (f.size() > 3 && !f[3].empty()) spec.h = std::stod(f[3]);
  } catch (const std::exception&) {
    throw tvi::ConfigError("malformed compare spec: '" + text + "'");
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Taylor variational integrator experiment harness"};
  app.require_subcommand(1);
  // --h is a real option here, so help lives on --help alone.
  app.set_help_flag("--help", "print help and exit");

  tvi::RunSpec spec;
  std::string method_str = "tvi";
  double tmax = 0.0;
  int ref_order = 8;
  std::string out, kind = "energy_trace";
  std::vector<double> hs;
  std::vector<std::string> spec_strs, inputs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print help and exit");
    cmd->add_option("--problem", spec.problem, "problem key (see list-problems)");
    cmd->add_option("--method", method_str, "integrator (see list-methods)");
    cmd->add_option("-r,--order", spec.r, "Taylor truncation order r");
    cmd->add_option("--quadrature", spec.quadrature, "quadrature rule (trapezoid, gauss2, ...)");
    cmd->add_option("--tol", spec.tol, "Newton residual tolerance");
    cmd->add_option("--seed", spec.seed, "seed for randomized initial data");
    cmd->add_option("--data-file", spec.data_file, "explicit n-body data table path");
  };

  CLI::App* run = app.add_subcommand("run", "integrate one trajectory, dump CSV diagnostics");
  add_common(run);
  run->add_option("--h", spec.h, "step size");
  run->add_option("--steps", spec.steps, "number of steps");
  run->add_option("--tmax", tmax, "final time; overrides --steps as round(tmax/h)");
  run->add_option("--out", spec.out, "trajectory CSV path");

  CLI::App* converge = app.add_subcommand("converge", "global error vs h at fixed final time");
  add_common(converge);
  converge->add_option("--h", hs, "step sizes (comma separated or repeated)")
      ->required()
      ->delimiter(',');
  converge->add_option("--tmax", tmax, "final time")->required();
  converge->add_option("--ref-order", ref_order, "Taylor order of the reference run");
  converge->add_option("--out", out, "convergence CSV path");

  CLI::App* compare = app.add_subcommand("compare", "run several methods on one problem");
  add_common(compare);
  compare->add_option("--h", spec.h, "default step size for specs without one");
  compare->add_option("--spec", spec_strs, "method[:r[:quadrature[:h]]], repeatable")
      ->required();
  compare->add_option("--tmax", tmax, "final time")->required();
  compare->add_option("--ref-order", ref_order, "Taylor order of the reference run");
  compare->add_option("--out", out, "comparison CSV path");

  CLI::App* plot = app.add_subcommand("plot", "render CSV output to a static SVG");
  plot->set_help_flag("--help", "print help and exit");
  plot->add_option("--kind", kind, "energy_trace | orbit_xy | loglog");
  plot->add_option("--out", out, "SVG path")->required();
  plot->add_option("inputs", inputs, "input CSV files")->required();

  CLI::App* list_problems = app.add_subcommand("list-problems", "print the problem registry");
  CLI::App* list_methods = app.add_subcommand("list-methods", "print the integrator names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      spec.method = tvi::method_from_string(method_str);
      if (tmax > 0.0) spec.steps = tvi::detail::steps_for(tmax, spec.h);
      tvi::Trajectory traj = tvi::run_trajectory(spec);
      print_summary(spec, traj);
      return traj.summary.completed ? 0 : 3;
    }
    if (converge->parsed()) {
      spec.method = tvi::method_from_string(method_str);
      tvi::ConvergenceResult res = tvi::convergence_study(spec, hs, tmax, ref_order);
      std::printf("%-12s %s\n", "h", "global_error");
      for (const auto& p : res.points) std::printf("%-12g %.12g\n", p.h, p.global_error);
      std::printf("slope = %.6g\n", res.slope);
      if (!out.empty()) {
        tvi::write_convergence_csv(out, res);
        std::printf("wrote %s\n", out.c_str());
      }
      return 0;
    }
    if (compare->parsed()) {
      std::vector<tvi::RunSpec> specs;
      for (const auto& s : spec_strs) specs.push_back(parse_compare_spec(s, spec));
      auto rows = tvi::compare_methods(specs, tmax, ref_order);
      std::printf("%-28s %-10s %-14s %-14s %-12s %s\n", "method", "h", "mean_energy_err",
                  "global_error", "wall_time_s", "status");
      for (const auto& r : rows)
        std::printf("%-28s %-10g %-14.6g %-14.6g %-12.6g %s\n", r.method.c_str(), r.h,
                    r.mean_energy_error, r.global_error, r.wall_time_s, r.status.c_str());
      if (!out.empty()) {
        tvi::write_compare_csv(out, rows);
        std::printf("wrote %s\n", out.c_str());
      }
      for (const auto& r : rows)
        if (r.status != "ok") return 3;
      return 0;
    }
    if (plot->parsed()) {
      tvi::emit_plot(inputs, tvi::plot_kind_from_string(kind), out);
      std::printf("wrote %s\n", out.c_str());
      return 0;
    }
    if (list_problems->parsed()) {
      std::printf("pendulum             planar pendulum released horizontally\n");
      std::printf("kepler               two-body problem, eccentric bound orbit\n");
      std::printf("henon_heiles         Henon-Heiles at energy 1/8 (--seed randomizes direction)\n");
      std::printf("fpu                  Fermi-Pasta-Ulam stiff spring chain, omega = 50\n");
      std::printf("outer_solar          sun and outer planets from the bundled table\n");
      std::printf("free_particle        constant drift (sanity)\n");
      std::printf("harmonic_oscillator  unit frequency (sanity)\n");
      return 0;
    }
    if (list_methods->parsed()) {
      for (const auto& [m, name] : tvi::method_names()) {
        std::string traits;
        if (tvi::method_uses_order(m)) traits += " r";
        if (tvi::method_uses_quadrature(m)) traits += " quadrature";
        if (tvi::method_is_implicit(m)) traits += " newton";
        std::printf("%-16s uses:%s\n", name.c_str(), traits.empty() ? " -" : traits.c_str());
      }
      return 0;
    }
  } catch (const tvi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const tvi::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const tvi::ConvergenceError& e) {
    std::fprintf(stderr, "solver failed: %s\n", e.what());
    return 3;
  } catch (const tvi::SingularMatrixError& e) {
    std::fprintf(stderr, "solver failed: %s\n", e.what());
    return 3;
  } catch (const tvi::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
