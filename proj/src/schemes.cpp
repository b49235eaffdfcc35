#include "lddflow/schemes.hpp"

#include <cmath>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "lddflow/csv.hpp"

namespace lddflow {

const char* to_string(StepOutcome outcome) {
  switch (outcome) {
    case StepOutcome::converged: return "converged";
    case StepOutcome::diverged: return "diverged";
    case StepOutcome::stalled: return "stalled";
    case StepOutcome::solver_failure: return "solver_failure";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (!(inner_tolerance > 0.0))
    throw std::invalid_argument("RunConfig: inner tolerance must be positive");
  if (max_inner_iterations < 1)
    throw std::invalid_argument("RunConfig: need at least one inner iteration");
  if (!(params.tau > 0.0)) throw std::invalid_argument("RunConfig: tau must be positive");
  if (!(t_end >= t_begin)) throw std::invalid_argument("RunConfig: t_end before t_begin");
  if (!(divergence_factor > 1.0))
    throw std::invalid_argument("RunConfig: divergence factor must exceed 1");
  if (scheme == SchemeKind::ldd || scheme == SchemeKind::lfv) {
    if (!(params.stabilization1 > 0.0) || !(params.stabilization2 > 0.0))
      throw std::invalid_argument("RunConfig: L-type schemes need positive stabilization");
  }
  if (scheme == SchemeKind::ldd) robin_coefficients(params.formulation);
}

std::vector<double> StepReport::l2_increment_series() const {
  std::vector<double> s;
  s.reserve(iterations.size());
  for (const auto& it : iterations) s.push_back(it.l2_increment);
  return s;
}

std::vector<double> StepReport::g_increment_series() const {
  std::vector<double> s;
  s.reserve(iterations.size());
  for (const auto& it : iterations) s.push_back(it.g_increment);
  return s;
}

SolveState initial_state(const DecomposedGrid& grid, const Problem& problem, double t_begin) {
  SolveState state;
  state.time = t_begin;
  if (problem.initial) {
    state.pressure = sample_field(
        grid, [&](Subdomain l, double x, double y) { return problem.initial(l, x, y); });
  } else {
    state.pressure = make_field(grid);
  }
  return state;
}

IterationReport error_metrics(const DecomposedGrid& grid, const DomainField& current,
                              const DomainField& previous, const Vector& pressure_jump_per_face,
                              const Vector& flux_jump_per_face,
                              const Vector& g_increment_per_face) {
  IterationReport r;
  DomainField diff;
  diff.omega1 = current.omega1 - previous.omega1;
  diff.omega2 = current.omega2 - previous.omega2;
  r.l2_increment = l2_cell_norm(grid, diff);
  r.linf_increment = linf_cell_norm(diff);
  r.pressure_jump = l2_interface_norm(grid, pressure_jump_per_face);
  r.flux_jump = l2_interface_norm(grid, flux_jump_per_face);
  r.g_increment = l2_interface_norm(grid, g_increment_per_face);
  return r;
}

double max_relative_error(const DecomposedGrid& grid, const Problem& problem,
                          const DomainField& p, double t, double guard) {
  if (!problem.has_exact())
    throw std::invalid_argument("max_relative_error: problem has no exact solution");
  double worst = 0.0;
  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    for (int iy = 0; iy < grid.ny(); ++iy) {
      for (int ix = 0; ix < grid.nx(l); ++ix) {
        const double exact =
            problem.exact(l, grid.cell_center_x(l, ix), grid.cell_center_y(iy), t);
        if (std::abs(exact) < guard) continue;
        const double num = p[l](grid.cell_index(l, ix, iy));
        worst = std::max(worst, std::abs((exact - num) / exact));
      }
    }
  }
  return worst;
}

std::vector<ProfileSample> midline_profile(const DecomposedGrid& grid, const Problem& problem,
                                           const DomainField& p, double t, double y_target) {
  int best_iy = 0;
  double best = std::numeric_limits<double>::max();
  for (int iy = 0; iy < grid.ny(); ++iy) {
    const double d = std::abs(grid.cell_center_y(iy) - y_target);
    if (d < best) {
      best = d;
      best_iy = iy;
    }
  }
  std::vector<ProfileSample> samples;
  const double y = grid.cell_center_y(best_iy);
  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    for (int ix = 0; ix < grid.nx(l); ++ix) {
      ProfileSample s;
      s.x = grid.cell_center_x(l, ix);
      s.p_num = p[l](grid.cell_index(l, ix, best_iy));
      s.p_exact = problem.has_exact() ? problem.exact(l, s.x, y, t)
                                      : std::numeric_limits<double>::quiet_NaN();
      s.rel_err = (problem.has_exact() && std::abs(s.p_exact) >= 1e-12)
                      ? std::abs((s.p_exact - s.p_num) / s.p_exact)
                      : std::numeric_limits<double>::quiet_NaN();
      samples.push_back(s);
    }
  }
  return samples;
}

ContractionRates contraction_rate(const std::vector<double>& series) {
  if (series.size() < 2)
    throw std::invalid_argument("contraction_rate: need at least two entries");
  std::vector<double> ratios;
  for (size_t i = 0; i + 1 < series.size(); ++i) {
    if (series[i] < 0.0 || series[i + 1] < 0.0)
      throw std::invalid_argument("contraction_rate: negative entry");
    if (series[i] == 0.0 || series[i + 1] == 0.0) break;  // truncate at first zero
    ratios.push_back(series[i + 1] / series[i]);
  }
  if (ratios.empty())
    throw std::invalid_argument("contraction_rate: no usable consecutive positive entries");
  ContractionRates rates;
  double sum = 0.0;
  for (double r : ratios) sum += r;
  rates.arithmetic = sum / static_cast<double>(ratios.size());
  const size_t k = std::min<size_t>(20, ratios.size());
  double log_sum = 0.0;
  for (size_t i = 0; i < k; ++i) log_sum += std::log(ratios[i]);
  rates.geometric = std::exp(log_sum / static_cast<double>(k));
  return rates;
}

namespace {

// Shared inner-iteration loop control: records a report entry, advances the
// divergence bookkeeping and decides whether to stop.
struct LoopControl {
  double first_increment = -1.0;
  double min_increment = std::numeric_limits<double>::max();
  int iterations_since_minimum = 0;
  StepOutcome outcome = StepOutcome::stalled;
  bool done = false;

  void inspect(const IterationReport& it, const RunConfig& config) {
    if (!it.gmres_ok) {
      // linear-solver breakdown; for Newton this is how a singular Jacobian
      // surfaces, which counts as scheme divergence
      outcome = config.scheme == SchemeKind::newton ? StepOutcome::diverged
                                                    : StepOutcome::solver_failure;
      done = true;
      return;
    }
    if (!std::isfinite(it.l2_increment)) {
      outcome = StepOutcome::diverged;
      done = true;
      return;
    }
    if (first_increment < 0.0) first_increment = it.l2_increment;
    if (it.l2_increment > config.divergence_factor * std::max(first_increment, 1e-300)) {
      outcome = StepOutcome::diverged;
      done = true;
      return;
    }
    if (it.l2_increment < min_increment) {
      min_increment = it.l2_increment;
      iterations_since_minimum = 0;
    } else {
      ++iterations_since_minimum;
    }
    if (config.stagnation_window > 0 && iterations_since_minimum >= config.stagnation_window &&
        min_increment > 10.0 * config.inner_tolerance) {
      outcome = StepOutcome::diverged;
      done = true;
      return;
    }
    if (it.l2_increment < config.inner_tolerance) {
      outcome = StepOutcome::converged;
      done = true;
    }
  }
};

Vector interface_mobility(const DecomposedGrid& grid, const Problem& problem, Subdomain l,
                          const Vector& p) {
  const int ix = l == Subdomain::omega1 ? grid.nx(l) - 1 : 0;
  Vector mob(grid.ny());
  for (int iy = 0; iy < grid.ny(); ++iy)
    mob(iy) = mobility(problem.model(l), p(grid.cell_index(l, ix, iy)));
  return mob;
}

// Two-sided interface diagnostics of a monolithic iterate: single-valued
// trace and the per-side outward fluxes (which cancel by construction).
void monolithic_interface_diagnostics(const DecomposedGrid& grid, const Problem& problem,
                                      const DomainField& p, Vector& pressure_jump,
                                      Vector& flux_jump) {
  const double half_x = 0.5 * grid.dx();
  pressure_jump = Vector::Zero(grid.ny());
  flux_jump = Vector::Zero(grid.ny());
  for (const auto& pair : interface_pairing(grid)) {
    const int iy = static_cast<int>(pair.cell_omega1 / grid.nx(Subdomain::omega1));
    const double y = pair.face_y;
    const double x1 = grid.cell_center_x(Subdomain::omega1, grid.nx(Subdomain::omega1) - 1);
    const double x2 = grid.cell_center_x(Subdomain::omega2, 0);
    const double p1 = p.omega1(pair.cell_omega1);
    const double p2 = p.omega2(pair.cell_omega2);
    const double psi1 = p1 + problem.zeta(x1, y);
    const double psi2 = p2 + problem.zeta(x2, y);
    const double t1 = mobility(problem.model(Subdomain::omega1), p1) / half_x;
    const double t2 = mobility(problem.model(Subdomain::omega2), p2) / half_x;
    const double sum = t1 + t2;
    const double psi_face = sum > 0.0 ? (t1 * psi1 + t2 * psi2) / sum : 0.5 * (psi1 + psi2);
    flux_jump(iy) = t1 * (psi1 - psi_face) + t2 * (psi2 - psi_face);
    pressure_jump(iy) = 0.0;  // single-valued trace
  }
}

}  // namespace

StepReport ldd_time_step(SolveState& state, const DecomposedGrid& grid, const Problem& problem,
                         const RunConfig& config, double dt, int step_index) {
  const RobinCoefficients robin = robin_coefficients(config.params.formulation);
  const double t_new = state.time + dt;

  StepReport report;
  report.step = step_index;
  report.time = t_new;

  SchemeParams params = config.params;
  params.tau = dt;

  InterfaceState iface;
  if (config.g_policy == GCarryPolicy::reinitialize || !state.interface_valid)
    iface = init_interface(grid, problem, state.pressure, params.formulation);
  else
    iface = state.interface;

  DomainField p_prev = config.guess_policy == GuessPolicy::constant
                           ? make_field(grid, config.guess_value)
                           : state.pressure;
  if (config.guess_policy == GuessPolicy::constant) {
    iface.trace[0].setConstant(config.guess_value);
    iface.trace[1].setConstant(config.guess_value);
  }

  const double half_x = 0.5 * grid.dx();
  LoopControl control;

  for (int iter = 1; iter <= config.max_inner_iterations && !control.done; ++iter) {
    InterfaceState next = update_g(iface, robin);

    DomainField p_new = p_prev;
    std::array<GmresStats, 2> stats;
    std::exception_ptr thread_error;

    const auto solve_side = [&](Subdomain l) {
      const int s = side_index(l);
      auto sys = assemble_ldd(grid, problem, l, p_prev[l], state.pressure[l], next.g[s], params,
                              t_new);
      if (config.matrix_sink) config.matrix_sink(step_index, iter, s + 1, sys);
      GmresOptions opts = config.gmres;
      opts.jacobi = config.effective_jacobi();
      auto solved = gmres(to_csr(sys.matrix), sys.rhs, p_prev[l], opts);
      p_new[l] = std::move(solved.x);
      stats[s] = solved.stats;

      const Vector mob = interface_mobility(grid, problem, l, p_prev[l]);
      const int ix = l == Subdomain::omega1 ? grid.nx(l) - 1 : 0;
      const double x_cell = grid.cell_center_x(l, ix);
      for (int iy = 0; iy < grid.ny(); ++iy) {
        const double y = grid.interface_face_y(iy);
        const double dz = problem.zeta(grid.x_split(), y) - problem.zeta(x_cell, y);
        const double datum = robin.m_scale * next.g[s](iy);
        next.trace[s](iy) = interface_trace(p_new[l](grid.cell_index(l, ix, iy)), datum,
                                            robin.weight, mob(iy), half_x, dz);
      }
    };

    if (config.threads >= 2) {
      std::thread worker([&] {
        try {
          solve_side(Subdomain::omega2);
        } catch (...) {
          thread_error = std::current_exception();
        }
      });
      solve_side(Subdomain::omega1);
      worker.join();
      if (thread_error) std::rethrow_exception(thread_error);
    } else {
      solve_side(Subdomain::omega1);
      solve_side(Subdomain::omega2);
    }

    // reconstructed Robin fluxes F.n_l = G_l + weight * trace_l
    Vector flux_jump(grid.ny()), pressure_jump(grid.ny()), g_inc(grid.ny());
    for (int iy = 0; iy < grid.ny(); ++iy) {
      const double q1 = robin.m_scale * next.g[0](iy) + robin.weight * next.trace[0](iy);
      const double q2 = robin.m_scale * next.g[1](iy) + robin.weight * next.trace[1](iy);
      flux_jump(iy) = q1 + q2;
      pressure_jump(iy) = next.trace[0](iy) - next.trace[1](iy);
      const double dg1 = (next.g[0](iy) - iface.g[0](iy)) / (1.0 - robin.eta);
      const double dg2 = (next.g[1](iy) - iface.g[1](iy)) / (1.0 - robin.eta);
      g_inc(iy) = std::sqrt(dg1 * dg1 + dg2 * dg2);
    }

    IterationReport it = error_metrics(grid, p_new, p_prev, pressure_jump, flux_jump, g_inc);
    it.iteration = iter;
    it.gmres_iterations = {stats[0].iterations, stats[1].iterations};
    it.gmres_ok = stats[0].converged && stats[1].converged;
    report.iterations.push_back(it);
    report.gmres_total += it.gmres_total();

    p_prev = std::move(p_new);
    iface = std::move(next);
    control.inspect(it, config);
  }

  report.inner_iterations = static_cast<int>(report.iterations.size());
  report.outcome = control.outcome;
  if (report.outcome == StepOutcome::converged) {
    state.pressure = std::move(p_prev);
    state.interface = std::move(iface);
    state.interface_valid = true;
    state.time = t_new;
  }
  return report;
}

StepReport monolithic_time_step(SolveState& state, const DecomposedGrid& grid,
                                const Problem& problem, const RunConfig& config, double dt,
                                int step_index) {
  const double t_new = state.time + dt;
  StepReport report;
  report.step = step_index;
  report.time = t_new;

  SchemeParams params = config.params;
  params.tau = dt;

  DomainField p_prev = config.guess_policy == GuessPolicy::constant
                           ? make_field(grid, config.guess_value)
                           : state.pressure;

  const Index n1 = grid.cells(Subdomain::omega1);
  const Index n = grid.total_cells();
  LoopControl control;

  for (int iter = 1; iter <= config.max_inner_iterations && !control.done; ++iter) {
    auto sys =
        assemble_monolithic(config.scheme, grid, problem, p_prev, state.pressure, params, t_new);
    if (config.matrix_sink) config.matrix_sink(step_index, iter, 0, sys);
    GmresOptions opts = config.gmres;
    opts.jacobi = config.effective_jacobi();

    Vector x0(n);
    if (sys.solves_increment)
      x0.setZero();
    else {
      x0.head(n1) = p_prev.omega1;
      x0.tail(n - n1) = p_prev.omega2;
    }
    auto solved = gmres(to_csr(sys.matrix), sys.rhs, x0, opts);

    DomainField p_new;
    if (sys.solves_increment) {
      p_new.omega1 = p_prev.omega1 + solved.x.head(n1);
      p_new.omega2 = p_prev.omega2 + solved.x.tail(n - n1);
    } else {
      p_new.omega1 = solved.x.head(n1);
      p_new.omega2 = solved.x.tail(n - n1);
    }

    Vector pressure_jump, flux_jump;
    monolithic_interface_diagnostics(grid, problem, p_new, pressure_jump, flux_jump);
    IterationReport it = error_metrics(grid, p_new, p_prev, pressure_jump, flux_jump,
                                       Vector::Zero(grid.ny()));
    it.iteration = iter;
    it.gmres_iterations = {solved.stats.iterations, 0};
    it.gmres_ok = solved.stats.converged;
    report.iterations.push_back(it);
    report.gmres_total += it.gmres_total();

    p_prev = std::move(p_new);
    control.inspect(it, config);
  }

  report.inner_iterations = static_cast<int>(report.iterations.size());
  report.outcome = control.outcome;
  if (report.outcome == StepOutcome::converged) {
    state.pressure = std::move(p_prev);
    state.interface_valid = false;
    state.time = t_new;
  }
  return report;
}

TransientReport run_transient(const DecomposedGrid& grid, const Problem& problem,
                              const RunConfig& config, const RunWriters* writers) {
  config.validate();
  problem.bc.validate();

  TransientReport tr;
  SolveState state = initial_state(grid, problem, config.t_begin);

  const double horizon = config.t_end - config.t_begin;
  const int n_steps =
      horizon <= 0.0 ? 0 : static_cast<int>(std::ceil(horizon / config.params.tau - 1e-12));

  if (writers && writers->iteration_log)
    *writers->iteration_log
        << "step,time,iter,l2_inc,linf_inc,p_jump,flux_jump,g_inc,gmres_iters\n";
  if (writers && writers->step_summary) *writers->step_summary << "step,time,inner_iters,converged\n";

  for (int step = 1; step <= n_steps; ++step) {
    const double dt = std::min(config.params.tau, config.t_end - state.time);
    StepReport sr = config.scheme == SchemeKind::ldd
                        ? ldd_time_step(state, grid, problem, config, dt, step)
                        : monolithic_time_step(state, grid, problem, config, dt, step);

    if (sr.outcome == StepOutcome::converged && problem.has_exact())
      sr.max_relative_error = max_relative_error(grid, problem, state.pressure, state.time);

    if (writers && writers->iteration_log) {
      for (const auto& it : sr.iterations) {
        *writers->iteration_log << sr.step << ',' << csv_number(sr.time) << ',' << it.iteration
                                << ',' << csv_number(it.l2_increment) << ','
                                << csv_number(it.linf_increment) << ','
                                << csv_number(it.pressure_jump) << ','
                                << csv_number(it.flux_jump) << ',' << csv_number(it.g_increment)
                                << ',' << it.gmres_total() << '\n';
      }
    }
    if (writers && writers->step_summary)
      *writers->step_summary << sr.step << ',' << csv_number(sr.time) << ','
                             << sr.inner_iterations << ','
                             << (sr.outcome == StepOutcome::converged ? 1 : 0) << '\n';

    tr.cumulative_gmres += sr.gmres_total;
    const StepOutcome outcome = sr.outcome;
    tr.steps.push_back(std::move(sr));
    if (outcome != StepOutcome::converged) {
      tr.all_converged = false;
      tr.first_failed_step = step;
      tr.failure = outcome;
      break;
    }
  }

  tr.final_time = state.time;
  tr.final_pressure = state.pressure;
  tr.final_interface = state.interface;
  if (problem.has_exact() && tr.final_time > config.t_begin)
    tr.final_relative_error = max_relative_error(grid, problem, tr.final_pressure, tr.final_time);

  if (writers && writers->profile) {
    *writers->profile << "x,p_num,p_exact,rel_err\n";
    for (const auto& s : midline_profile(grid, problem, tr.final_pressure, tr.final_time)) {
      *writers->profile << csv_number(s.x) << ',' << csv_number(s.p_num) << ','
                        << csv_number(s.p_exact) << ',' << csv_number(s.rel_err) << '\n';
    }
  }
  return tr;
}

}  // namespace lddflow
