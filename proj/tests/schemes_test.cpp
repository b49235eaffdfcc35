#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lddflow/cases.hpp"
#include "lddflow/schemes.hpp"

using namespace lddflow;

namespace {

Problem steady_linear_problem(double slope, double mobility_value, double value) {
  Problem p;
  p.models = {LinearModel{slope, mobility_value}, LinearModel{slope, mobility_value}};
  const SideCondition fixed{BcKind::dirichlet,
                            [value](double, double, double) { return value; }};
  p.bc.set(Subdomain::omega1, Side::west, fixed);
  p.bc.set(Subdomain::omega1, Side::south, fixed);
  p.bc.set(Subdomain::omega1, Side::north, fixed);
  p.bc.set(Subdomain::omega2, Side::east, fixed);
  p.bc.set(Subdomain::omega2, Side::south, fixed);
  p.bc.set(Subdomain::omega2, Side::north, fixed);
  p.initial = [value](Subdomain, double, double) { return value; };
  return p;
}

RunConfig manufactured_config(SchemeKind kind, double tau, double lambda, double l_value) {
  RunConfig config;
  config.scheme = kind;
  config.params.stabilization1 = config.params.stabilization2 = l_value;
  config.params.tau = tau;
  config.params.formulation = Formulation::lambda_form(lambda);
  config.t_end = tau;
  return config;
}

}  // namespace

TEST_CASE("contraction_rate hand values") {
  CHECK(contraction_rate({1.0, 0.5, 0.25}).arithmetic == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(contraction_rate({1.0, 0.5, 0.25}).geometric == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(contraction_rate({1.0, 1.0, 1.0}).geometric == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> decades(21);
  for (int i = 0; i <= 20; ++i) decades[i] = std::pow(10.0, -i);
  CHECK(contraction_rate(decades).geometric == doctest::Approx(0.1).epsilon(1e-12));

  // ratios truncate at the first zero entry
  const ContractionRates truncated = contraction_rate({1.0, 0.5, 0.0, 7.0});
  CHECK(truncated.arithmetic == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(contraction_rate({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(contraction_rate({1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(contraction_rate({0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("error_metrics norms") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.5));
  const DomainField a = make_field(grid, 1.5);
  const IterationReport zero =
      error_metrics(grid, a, a, Vector::Zero(2), Vector::Zero(2), Vector::Zero(2));
  CHECK(zero.l2_increment == 0.0);
  CHECK(zero.linf_increment == 0.0);
  CHECK(zero.pressure_jump == 0.0);

  // two faces with traces (1,0) and (2,2): jumps 1 and 0, dy = 0.5
  Vector jumps(2);
  jumps << 1.0 - 0.0, 2.0 - 2.0;
  const IterationReport r =
      error_metrics(grid, a, a, jumps, Vector::Zero(2), Vector::Zero(2));
  CHECK(r.pressure_jump == doctest::Approx(std::sqrt(1.0 * 0.5)).epsilon(1e-14));
}

TEST_CASE("max_relative_error guards near-zero exact values") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.5));
  const Problem p = manufactured_case();
  // exact solution at t = 0: p1(0,0,0) = 0 is excluded by the guard
  DomainField exact0 = sample_field(
      grid, [](Subdomain l, double x, double y) { return manufactured_exact(l, x, y, 0.0); });
  CHECK(max_relative_error(grid, p, exact0, 0.0) == doctest::Approx(0.0).scale(1.0));
  exact0.omega1(0) += 0.01;  // cell (-0.75, 0.25), exact = -0.625
  CHECK(max_relative_error(grid, p, exact0, 0.0) ==
        doctest::Approx(0.01 / 0.625).epsilon(1e-10));
}

TEST_CASE("steady linear case converges immediately for LDD") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.25));
  const Problem p = steady_linear_problem(0.3, 1.0, -2.0);
  RunConfig config = manufactured_config(SchemeKind::ldd, 0.05, 2.0, 0.3);
  config.inner_tolerance = 1e-8;

  SolveState state = initial_state(grid, p, 0.0);
  const StepReport step = ldd_time_step(state, grid, p, config, 0.05, 1);
  CHECK(step.outcome == StepOutcome::converged);
  CHECK(step.inner_iterations <= 2);
  CHECK((state.pressure.omega1.array() + 2.0).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("newton solves a linear problem in one iteration") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.25));
  Problem p = steady_linear_problem(1.0, 1.0, 0.0);
  // non-steady data: boundary values jump to -1 at the new time level
  const SideCondition drive{BcKind::dirichlet, [](double, double, double) { return -1.0; }};
  p.bc.set(Subdomain::omega1, Side::west, drive);
  RunConfig config = manufactured_config(SchemeKind::newton, 0.1, 1.0, 1.0);
  config.inner_tolerance = 1e-9;

  SolveState state = initial_state(grid, p, 0.0);
  const StepReport step = monolithic_time_step(state, grid, p, config, 0.1, 1);
  CHECK(step.outcome == StepOutcome::converged);
  CHECK(step.inner_iterations <= 2);
  if (step.iterations.size() >= 2) CHECK(step.iterations[1].l2_increment <= 1e-9);
}

TEST_CASE("one LDD sweep reproduces a converged monolithic step") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.25));
  const Problem p = manufactured_case();

  RunConfig mono = manufactured_config(SchemeKind::lfv, 0.01, 4.0, 0.25);
  mono.inner_tolerance = 1e-12;
  mono.max_inner_iterations = 400;
  SolveState state = initial_state(grid, p, 0.0);
  const DomainField previous_time = state.pressure;
  const StepReport step = monolithic_time_step(state, grid, p, mono, 0.01, 1);
  REQUIRE(step.outcome == StepOutcome::converged);

  // interface data of the converged solution; Remark-1 relations hold
  const Formulation f = Formulation::lambda_form(4.0);
  const RobinCoefficients robin = robin_coefficients(f);
  const InterfaceState fixed_point = init_interface(grid, p, state.pressure, f);

  const InterfaceState swept = update_g(fixed_point, robin);
  CHECK((swept.g[0] - fixed_point.g[0]).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((swept.g[1] - fixed_point.g[1]).cwiseAbs().maxCoeff() <= 1e-12);

  SchemeParams params = mono.params;
  params.formulation = f;
  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    const SubdomainSystem sys =
        assemble_ldd(grid, p, l, state.pressure[l], previous_time[l],
                     swept.g[side_index(l)], params, state.time);
    const GmresResult solved =
        gmres(to_csr(sys.matrix), sys.rhs, state.pressure[l], {30, 1e-13, 0, false});
    CHECK(solved.stats.converged);
    CHECK((solved.x - state.pressure[l]).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("lambda and generalized formulations produce identical iterates") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.1));
  const Problem p = manufactured_case();

  RunConfig lam = manufactured_config(SchemeKind::ldd, 0.01, 4.0, 0.25);
  lam.inner_tolerance = 1e-10;
  RunConfig gen = lam;
  gen.params.formulation = Formulation::generalized(5.0, 0.8);

  SolveState s1 = initial_state(grid, p, 0.0);
  SolveState s2 = initial_state(grid, p, 0.0);
  const StepReport r1 = ldd_time_step(s1, grid, p, lam, 0.01, 1);
  const StepReport r2 = ldd_time_step(s2, grid, p, gen, 0.01, 1);
  REQUIRE(r1.outcome == StepOutcome::converged);
  REQUIRE(r2.outcome == StepOutcome::converged);
  REQUIRE(r1.inner_iterations == r2.inner_iterations);
  for (size_t i = 0; i < r1.iterations.size(); ++i) {
    CHECK(r1.iterations[i].l2_increment ==
          doctest::Approx(r2.iterations[i].l2_increment).epsilon(1e-10).scale(1e-10));
    CHECK(r1.iterations[i].pressure_jump ==
          doctest::Approx(r2.iterations[i].pressure_jump).epsilon(1e-10).scale(1e-10));
  }
  CHECK((s1.pressure.omega1 - s2.pressure.omega1).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("interface jumps vanish at LDD convergence") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.1));
  const Problem p = manufactured_case();
  RunConfig config = manufactured_config(SchemeKind::ldd, 0.01, 4.0, 0.25);
  config.inner_tolerance = 1e-10;
  config.max_inner_iterations = 400;

  SolveState state = initial_state(grid, p, 0.0);
  const StepReport step = ldd_time_step(state, grid, p, config, 0.01, 1);
  REQUIRE(step.outcome == StepOutcome::converged);
  const IterationReport& last = step.iterations.back();
  CHECK(last.pressure_jump < 1e-6);
  CHECK(last.flux_jump < 1e-6);
  // the flux jump tracks lambda times the pressure-trace error scale
  CHECK(last.flux_jump <= 10.0 * 4.0 * last.pressure_jump);
}

TEST_CASE("discrete mass balance of a converged monolithic step") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.2));
  const Problem p = manufactured_case();
  RunConfig config = manufactured_config(SchemeKind::lfv, 0.01, 4.0, 0.25);
  config.inner_tolerance = 1e-12;
  config.max_inner_iterations = 500;

  SolveState state = initial_state(grid, p, 0.0);
  const DomainField before = state.pressure;
  const StepReport step = monolithic_time_step(state, grid, p, config, 0.01, 1);
  REQUIRE(step.outcome == StepOutcome::converged);

  const double tau = 0.01;
  const double t_new = state.time;
  double balance = 0.0;
  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    const auto& model = p.model(l);
    for (int iy = 0; iy < grid.ny(); ++iy)
      for (int ix = 0; ix < grid.nx(l); ++ix) {
        const Index i = grid.cell_index(l, ix, iy);
        balance += (accumulation(model, state.pressure[l](i)) -
                    accumulation(model, before[l](i))) *
                   grid.cell_area();
        balance -= tau * grid.cell_area() *
                   p.source_at(l, grid.cell_center_x(l, ix), grid.cell_center_y(iy), t_new);
      }
  }
  const FluxField flux = flux_field(grid, p, state.pressure, t_new);
  const int n1x = grid.nx(Subdomain::omega1);
  const int n2x = grid.nx(Subdomain::omega2);
  for (int iy = 0; iy < grid.ny(); ++iy) {
    balance -= tau * grid.dy() * flux.x_faces(Subdomain::omega1)(iy * (n1x + 1));  // west
    balance += tau * grid.dy() * flux.x_faces(Subdomain::omega2)(iy * (n2x + 1) + n2x);  // east
  }
  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    const int nx = grid.nx(l);
    for (int ix = 0; ix < nx; ++ix) {
      balance -= tau * grid.dx() * flux.y_faces(l)(ix);                      // south
      balance += tau * grid.dx() * flux.y_faces(l)(grid.ny() * nx + ix);     // north
    }
  }
  CHECK(std::abs(balance) <= 1e-10);
}

TEST_CASE("run_transient with zero horizon returns an empty report") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.5));
  const Problem p = manufactured_case();
  RunConfig config = manufactured_config(SchemeKind::ldd, 0.1, 2.0, 0.25);
  config.t_end = 0.0;
  const TransientReport report = run_transient(grid, p, config);
  CHECK(report.steps.empty());
  CHECK(report.all_converged);
  CHECK(report.final_time == 0.0);
}

TEST_CASE("transient runs are deterministic and thread-count independent") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.25));
  const Problem p = manufactured_case();
  RunConfig config = manufactured_config(SchemeKind::ldd, 0.05, 4.0, 0.25);
  config.t_end = 0.1;

  const auto run_to_string = [&](int threads) {
    RunConfig c = config;
    c.threads = threads;
    std::ostringstream iterations, steps;
    RunWriters writers;
    writers.iteration_log = &iterations;
    writers.step_summary = &steps;
    run_transient(grid, p, c, &writers);
    return iterations.str() + "|" + steps.str();
  };
  const std::string once = run_to_string(1);
  CHECK(once == run_to_string(1));
  CHECK(once == run_to_string(2));
}

TEST_CASE("transient step count matches ceil(T / tau)") {
  const DecomposedGrid grid = build_grid(benchmark_grid(0.5));
  const Problem p = steady_linear_problem(1.0, 1.0, -1.0);
  RunConfig config = manufactured_config(SchemeKind::lfv, 0.04, 2.0, 1.0);
  config.t_end = 0.1;  // 2.5 steps -> 3 with a short last step
  const TransientReport report = run_transient(grid, p, config);
  CHECK(report.steps.size() == 3);
  CHECK(report.final_time == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("g-update identity holds along a run") {
  // algebraic identity of the update in true-g units:
  // g1' + g2' = -2 lambda (trace1 + trace2) - (g1 + g2)
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const RobinCoefficients robin = robin_coefficients(Formulation::lambda_form(3.7));
  for (int trial = 0; trial < 50; ++trial) {
    InterfaceState s;
    for (int side = 0; side < 2; ++side) {
      s.g[side] = Vector::NullaryExpr(4, [&](Index) { return dist(rng); });
      s.trace[side] = Vector::NullaryExpr(4, [&](Index) { return dist(rng); });
    }
    const InterfaceState next = update_g(s, robin);
    const Vector lhs = next.true_g(Subdomain::omega1, robin) +
                       next.true_g(Subdomain::omega2, robin);
    const Vector rhs =
        -2.0 * robin.weight * (s.trace[0] + s.trace[1]) -
        (s.true_g(Subdomain::omega1, robin) + s.true_g(Subdomain::omega2, robin));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
