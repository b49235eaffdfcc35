#include "lddflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "lddflow/cases.hpp"
#include "lddflow/csv.hpp"

namespace lddflow {

namespace {

SchemeKind parse_scheme(const std::string& name) {
  if (name == "ldd") return SchemeKind::ldd;
  if (name == "lfv") return SchemeKind::lfv;
  if (name == "picard") return SchemeKind::picard;
  if (name == "newton") return SchemeKind::newton;
  throw ConfigError("unknown scheme kind: " + name);
}

const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::ldd: return "ldd";
    case SchemeKind::lfv: return "lfv";
    case SchemeKind::picard: return "picard";
    case SchemeKind::newton: return "newton";
  }
  return "?";
}

VanGenuchtenSoil soil_from_config(const ConfigFile& cfg, int index,
                                  const VanGenuchtenSoil& fallback,
                                  const FluidProperties& fluid) {
  const std::string suffix = std::to_string(index);
  if (!cfg.has("case", "theta_r" + suffix)) return fallback;
  return soil_from_head_units(cfg.require_double("case", "theta_r" + suffix),
                              cfg.require_double("case", "theta_s" + suffix),
                              cfg.require_double("case", "alpha_per_m" + suffix),
                              cfg.require_double("case", "n_hat" + suffix),
                              cfg.require_double("case", "conductivity" + suffix), fluid);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  return out;
}

ContractionRates safe_rates(const StepReport& step) {
  const auto series = step.l2_increment_series();
  if (series.size() < 2) return {std::nan(""), std::nan("")};
  try {
    return contraction_rate(series);
  } catch (const std::invalid_argument&) {
    return {std::nan(""), std::nan("")};
  }
}

}  // namespace

RunSetup build_setup(const ConfigFile& cfg, const CliOptions& options) {
  try {
    const std::string case_type = cfg.get_string("case", "type", "manufactured");

    GridSpec spec = benchmark_grid(cfg.get_double("grid", "dx", 0.05));
    spec.x_min = cfg.get_double("grid", "x_min", spec.x_min);
    spec.x_split = cfg.get_double("grid", "x_split", spec.x_split);
    spec.x_max = cfg.get_double("grid", "x_max", spec.x_max);
    spec.y_min = cfg.get_double("grid", "y_min", spec.y_min);
    spec.y_max = cfg.get_double("grid", "y_max", spec.y_max);
    spec.dy = cfg.get_double("grid", "dy", spec.dx);

    Problem problem;
    if (case_type == "manufactured") {
      problem = manufactured_case();
    } else if (case_type == "realistic") {
      RealisticCaseParams params;
      params.fluid.density = cfg.get_double("case", "rho", params.fluid.density);
      params.fluid.viscosity = cfg.get_double("case", "mu", params.fluid.viscosity);
      params.fluid.gravity = cfg.get_double("case", "gravity", params.fluid.gravity);
      params.scales.pressure = cfg.get_double("case", "p_star", params.scales.pressure);
      params.scales.length = cfg.get_double("case", "length_star", params.scales.length);
      params.scales.time = cfg.get_double("case", "time_star", params.scales.time);
      params.epsilon = cfg.get_double("case", "epsilon", params.epsilon);
      params.soil1 = soil_from_config(cfg, 1, silt_loam_ge3(params.fluid), params.fluid);
      params.soil2 = soil_from_config(cfg, 2, hygiene_sandstone(params.fluid), params.fluid);
      problem = realistic_case(params);
    } else {
      throw ConfigError("unknown case type: " + case_type);
    }

    RunConfig run;
    run.scheme = parse_scheme(cfg.get_string("scheme", "kind", "ldd"));
    const double l_both = cfg.get_double("scheme", "L", 0.25);
    run.params.stabilization1 = cfg.get_double("scheme", "L1", l_both);
    run.params.stabilization2 = cfg.get_double("scheme", "L2", l_both);
    const std::string formulation = cfg.get_string("scheme", "formulation", "lambda");
    if (formulation == "lambda")
      run.params.formulation = Formulation::lambda_form(cfg.get_double("scheme", "lambda", 4.0));
    else if (formulation == "convex")
      run.params.formulation = Formulation::convex(cfg.require_double("scheme", "eta"));
    else if (formulation == "generalized")
      run.params.formulation = Formulation::generalized(cfg.require_double("scheme", "m_scale"),
                                                        cfg.require_double("scheme", "eta"));
    else
      throw ConfigError("unknown formulation: " + formulation);
    run.params.tau = cfg.get_double("scheme", "tau", 0.01);
    run.t_begin = cfg.get_double("scheme", "t_begin", 0.0);
    run.t_end = cfg.get_double("scheme", "t_end", 0.2);
    run.inner_tolerance = cfg.get_double("scheme", "inner_tol", 1e-6);
    run.max_inner_iterations = cfg.get_int("scheme", "max_inner", 200);
    run.divergence_factor = cfg.get_double("scheme", "divergence_factor", 1e6);
    const std::string guess = cfg.get_string("scheme", "initial_guess", "previous");
    if (guess == "previous")
      run.guess_policy = GuessPolicy::previous_time;
    else if (guess == "constant")
      run.guess_policy = GuessPolicy::constant;
    else
      throw ConfigError("unknown initial_guess policy: " + guess);
    run.guess_value = cfg.get_double("scheme", "initial_guess_value", -5.0);
    const std::string g_policy = cfg.get_string("scheme", "g_policy", "reinit");
    if (g_policy == "reinit")
      run.g_policy = GCarryPolicy::reinitialize;
    else if (g_policy == "carry")
      run.g_policy = GCarryPolicy::carry;
    else
      throw ConfigError("unknown g_policy: " + g_policy);

    run.gmres.restart = cfg.get_int("gmres", "restart", 30);
    run.gmres.tol = cfg.get_double("gmres", "tol", 1e-10);
    run.gmres.max_iterations = cfg.get_int("gmres", "max_iter", 0);
    const std::string jacobi = cfg.get_string("gmres", "jacobi", "auto");
    if (jacobi == "on")
      run.jacobi = true;
    else if (jacobi == "off")
      run.jacobi = false;
    else if (jacobi != "auto")
      throw ConfigError("gmres.jacobi must be auto, on or off");
    run.threads = options.threads;

    RunSetup setup{spec, build_grid(spec), std::move(problem), std::move(run)};
    setup.run.validate();
    setup.problem.bc.validate();
    return setup;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

namespace {

void write_summary(std::ostream& out, const ConfigFile& cfg, const RunSetup& setup,
                   const TransientReport& report) {
  out << "case.type = " << cfg.get_string("case", "type", "manufactured") << '\n';
  out << "grid.dx = " << csv_number(setup.grid_spec.dx) << '\n';
  out << "grid.dy = " << csv_number(setup.grid_spec.dy) << '\n';
  out << "scheme.kind = " << scheme_name(setup.run.scheme) << '\n';
  out << "scheme.L1 = " << csv_number(setup.run.params.stabilization1) << '\n';
  out << "scheme.L2 = " << csv_number(setup.run.params.stabilization2) << '\n';
  if (setup.run.params.formulation.kind == Formulation::Kind::lambda)
    out << "scheme.lambda = " << csv_number(setup.run.params.formulation.lambda) << '\n';
  out << "scheme.tau = " << csv_number(setup.run.params.tau) << '\n';
  out << "scheme.t_end = " << csv_number(setup.run.t_end) << '\n';
  out << "scheme.inner_tol = " << csv_number(setup.run.inner_tolerance) << '\n';
  out << "scheme.max_inner = " << setup.run.max_inner_iterations << '\n';
  out << "gmres.restart = " << setup.run.gmres.restart << '\n';
  out << "gmres.tol = " << csv_number(setup.run.gmres.tol) << '\n';
  out << "steps = " << report.steps.size() << '\n';
  out << "cumulative_gmres = " << report.cumulative_gmres << '\n';
  out << "outcome = "
      << (report.all_converged ? "converged" : to_string(report.failure)) << '\n';
  if (std::isfinite(report.final_relative_error))
    out << "final_relative_error = " << csv_number(report.final_relative_error) << '\n';
}

int exit_code_for(const TransientReport& report) {
  if (report.all_converged) return exit_ok;
  return report.failure == StepOutcome::solver_failure ? exit_solver_failure : exit_divergence;
}

}  // namespace

int cmd_run(const ConfigFile& cfg, const CliOptions& options, std::ostream& log) {
  RunSetup setup = build_setup(cfg, options);
  const std::filesystem::path out_dir(options.out_dir);
  std::filesystem::create_directories(out_dir);

  auto iterations = open_output(out_dir / "run_iterations.csv");
  auto steps = open_output(out_dir / "run_steps.csv");
  std::ofstream profile;
  RunWriters writers;
  writers.iteration_log = &iterations;
  writers.step_summary = &steps;
  if (setup.problem.has_exact()) {
    profile = open_output(out_dir / "run_profile.csv");
    writers.profile = &profile;
  }

  if (options.dump_matrices) {
    const auto dir = out_dir;
    setup.run.matrix_sink = [dir](int step, int iter, int block, const SubdomainSystem& sys) {
      static const char* names[] = {"mono", "omega1", "omega2"};
      std::ofstream out(dir / ("matrix_s" + std::to_string(step) + "_i" + std::to_string(iter) +
                               "_" + names[block] + ".txt"));
      dump_coordinate_format(to_csr(sys.matrix), out);  // duplicates summed
    };
  }

  const TransientReport report = run_transient(setup.grid, setup.problem, setup.run, &writers);

  auto summary = open_output(out_dir / "run_summary.txt");
  write_summary(summary, cfg, setup, report);

  log << "run: " << report.steps.size() << " step(s), outcome "
      << (report.all_converged ? "converged" : to_string(report.failure)) << "\n";
  if (std::isfinite(report.final_relative_error))
    log << "run: final relative error vs exact " << csv_number(report.final_relative_error) << "\n";
  return exit_code_for(report);
}

namespace {

// Runs up to the step containing snapshot_time, then performs that single
// step with its own tolerance/iteration budget so contraction rates can be
// measured on a long series.
StepReport snapshot_step(const RunSetup& setup, double snapshot_time, double tol, int max_inner) {
  RunConfig warmup = setup.run;
  const double tau = warmup.params.tau;
  const int snap_index = std::max(1, static_cast<int>(std::ceil(snapshot_time / tau - 1e-12)));
  warmup.t_end = warmup.t_begin + (snap_index - 1) * tau;

  const TransientReport before = run_transient(setup.grid, setup.problem, warmup);
  SolveState state;
  state.pressure = before.final_pressure;
  state.interface = before.final_interface;
  state.interface_valid = !before.steps.empty() && setup.run.scheme == SchemeKind::ldd;
  state.time = before.final_time;
  if (!before.all_converged) {
    StepReport failed;
    failed.outcome = before.failure;
    return failed;
  }

  RunConfig probe = setup.run;
  probe.inner_tolerance = tol;
  probe.max_inner_iterations = max_inner;
  return probe.scheme == SchemeKind::ldd
             ? ldd_time_step(state, setup.grid, setup.problem, probe, tau, snap_index)
             : monolithic_time_step(state, setup.grid, setup.problem, probe, tau, snap_index);
}

}  // namespace

int cmd_sweep(const ConfigFile& cfg, const CliOptions& options, std::ostream& log) {
  const RunSetup base = build_setup(cfg, options);

  auto axis = [&](const char* key, double fallback) {
    std::vector<double> values = cfg.get_list("sweep", key);
    if (values.empty()) values.push_back(fallback);
    return values;
  };
  const bool any_axis = cfg.has("sweep", "lambda") || cfg.has("sweep", "L") ||
                        cfg.has("sweep", "tau") || cfg.has("sweep", "dx");
  if (!any_axis) throw ConfigError("cmd_sweep: no sweep axes given");

  const std::vector<double> lambdas = axis("lambda", base.run.params.formulation.lambda);
  const std::vector<double> l_values = axis("L", base.run.params.stabilization1);
  const std::vector<double> taus = axis("tau", base.run.params.tau);
  const std::vector<double> dxs = axis("dx", base.grid_spec.dx);
  const double snapshot_time = cfg.get_double("sweep", "snapshot_time", 0.2);
  const double snapshot_tol = cfg.get_double("sweep", "snapshot_tol", 1e-12);
  const int snapshot_max_inner = cfg.get_int("sweep", "max_inner", base.run.max_inner_iterations);

  struct Row {
    double lambda, l_value, tau, dx, rate;
    bool converged;
    int inner;
  };
  std::vector<Row> rows;

  for (double dx : dxs) {
    for (double tau : taus) {
      for (double l_value : l_values) {
        for (double lambda : lambdas) {
          RunSetup point = base;
          point.grid_spec.dx = dx;
          point.grid_spec.dy = dx;
          point.grid = build_grid(point.grid_spec);
          point.run.params.tau = tau;
          point.run.params.stabilization1 = l_value;
          point.run.params.stabilization2 = l_value;
          if (point.run.params.formulation.kind == Formulation::Kind::lambda)
            point.run.params.formulation = Formulation::lambda_form(lambda);
          Row row{lambda, l_value, tau, dx, std::nan(""), false, 0};
          try {
            point.run.validate();
            const StepReport step =
                snapshot_step(point, snapshot_time, snapshot_tol, snapshot_max_inner);
            row.inner = step.inner_iterations;
            // stalling at the probe tolerance still yields a usable series
            if (step.outcome == StepOutcome::converged ||
                step.outcome == StepOutcome::stalled) {
              row.converged = true;
              row.rate = safe_rates(step).geometric;
            }
          } catch (const std::invalid_argument& e) {
            log << "sweep point skipped (lambda=" << lambda << ", L=" << l_value
                << "): " << e.what() << "\n";
          }
          rows.push_back(row);
        }
      }
    }
  }

  // argmin of the rate over the lambda axis within each (dx, tau, L) block
  const std::filesystem::path out_dir(options.out_dir);
  std::filesystem::create_directories(out_dir);
  auto out = open_output(out_dir / "sweep.csv");
  out << "lambda,L,tau,dx,rate,converged,inner_iters,lambda_opt\n";
  const size_t block = lambdas.size();
  for (size_t start = 0; start < rows.size(); start += block) {
    double best_rate = std::numeric_limits<double>::infinity();
    double lambda_opt = std::nan("");
    for (size_t i = start; i < start + block; ++i) {
      if (rows[i].converged && rows[i].rate < best_rate) {
        best_rate = rows[i].rate;
        lambda_opt = rows[i].lambda;
      }
    }
    for (size_t i = start; i < start + block; ++i) {
      const Row& r = rows[i];
      out << csv_number(r.lambda) << ',' << csv_number(r.l_value) << ',' << csv_number(r.tau)
          << ',' << csv_number(r.dx) << ',' << csv_number(r.rate) << ',' << (r.converged ? 1 : 0)
          << ',' << r.inner << ',' << csv_number(lambda_opt) << '\n';
    }
  }
  log << "sweep: " << rows.size() << " point(s) written\n";
  return exit_ok;
}

int cmd_compare(const ConfigFile& cfg, const CliOptions& options, std::ostream& log) {
  const RunSetup base = build_setup(cfg, options);
  const std::string scheme_list = cfg.require_string("compare", "schemes");

  std::vector<SchemeKind> kinds;
  {
    std::string item;
    std::istringstream in(scheme_list);
    while (std::getline(in, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) kinds.push_back(parse_scheme(item));
    }
  }
  if (kinds.size() < 2) throw ConfigError("cmd_compare: need at least two schemes");

  const double snapshot_time = cfg.get_double("compare", "snapshot_time", 0.2);

  const std::filesystem::path out_dir(options.out_dir);
  std::filesystem::create_directories(out_dir);
  auto summary = open_output(out_dir / "compare_summary.csv");
  auto curves = open_output(out_dir / "compare_curves.csv");
  auto timing = open_output(out_dir / "compare_timing.csv");
  summary << "scheme,steps_completed,avg_inner_iters,cumulative_gmres,rate,outcome\n";
  curves << "scheme,iter,l2_inc,linf_inc,p_jump,flux_jump,g_inc\n";
  timing << "scheme,wall_ms_total,wall_ms_per_inner_iter\n";

  for (SchemeKind kind : kinds) {
    RunSetup setup = base;
    setup.run.scheme = kind;
    const std::string override_key = std::string("L_") + scheme_name(kind);
    if (cfg.has("compare", override_key)) {
      const double l_value = cfg.require_double("compare", override_key);
      setup.run.params.stabilization1 = l_value;
      setup.run.params.stabilization2 = l_value;
    }
    setup.run.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const TransientReport report = run_transient(setup.grid, setup.problem, setup.run);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    long total_inner = 0;
    for (const auto& s : report.steps) total_inner += s.inner_iterations;
    const double avg_inner =
        report.steps.empty() ? 0.0 : static_cast<double>(total_inner) / report.steps.size();

    // error curves at the step containing snapshot_time (or the last step)
    const int snap_index =
        std::max(1, static_cast<int>(std::ceil(snapshot_time / setup.run.params.tau - 1e-12)));
    const StepReport* snap = nullptr;
    if (!report.steps.empty())
      snap = snap_index <= static_cast<int>(report.steps.size())
                 ? &report.steps[snap_index - 1]
                 : &report.steps.back();
    double rate = std::nan("");
    if (snap && snap->iterations.size() >= 2) rate = safe_rates(*snap).geometric;

    summary << scheme_name(kind) << ',' << report.steps.size() << ',' << csv_number(avg_inner)
            << ',' << report.cumulative_gmres << ',' << csv_number(rate) << ','
            << (report.all_converged ? "converged" : to_string(report.failure)) << '\n';
    if (snap)
      for (const auto& it : snap->iterations)
        curves << scheme_name(kind) << ',' << it.iteration << ',' << csv_number(it.l2_increment)
               << ',' << csv_number(it.linf_increment) << ',' << csv_number(it.pressure_jump)
               << ',' << csv_number(it.flux_jump) << ',' << csv_number(it.g_increment) << '\n';
    timing << scheme_name(kind) << ',' << csv_number(wall_ms) << ','
           << csv_number(total_inner > 0 ? wall_ms / total_inner : 0.0) << '\n';

    log << "compare: " << scheme_name(kind) << " -> "
        << (report.all_converged ? "converged" : to_string(report.failure)) << "\n";
  }
  return exit_ok;
}

int cmd_tau_bound(const ConfigFile& cfg, const CliOptions& options, std::ostream& log) {
  (void)options;
  try {
    const MaterialBounds bounds(cfg.require_double("bounds", "L_S"),
                                cfg.require_double("bounds", "L_k"),
                                cfg.require_double("bounds", "m"),
                                cfg.require_double("bounds", "M"));
    const double l_value = cfg.get_double("scheme", "L", 0.25);
    const double tau = cfg.get_double("scheme", "tau", 0.01);
    const double bound = tau_max(bounds, l_value);
    log << "tau_max = " << csv_number(bound) << "\n";
    log << "tau = " << csv_number(tau) << " "
        << (tau < bound ? "satisfied" : "not satisfied (advisory: the bound is sufficient, "
                                        "not necessary)")
        << "\n";
    return exit_ok;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("tau-bound: ") + e.what());
  }
}

}  // namespace lddflow
