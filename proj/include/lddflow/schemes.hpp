#ifndef LDDFLOW_SCHEMES_HPP
#define LDDFLOW_SCHEMES_HPP

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "lddflow/assembly.hpp"

namespace lddflow {

/// Error record of one inner iteration.
struct IterationReport {
  int iteration = 0;
  double l2_increment = 0.0;    // |p^i - p^{i-1}| in L2(Omega)
  double linf_increment = 0.0;
  double pressure_jump = 0.0;   // |[p]| in L2(Gamma)
  double flux_jump = 0.0;       // |[F.n]| in L2(Gamma)
  double g_increment = 0.0;     // |g^i - g^{i-1}| in L2(Gamma), both sides
  std::array<Index, 2> gmres_iterations{0, 0};
  bool gmres_ok = true;

  Index gmres_total() const { return gmres_iterations[0] + gmres_iterations[1]; }
};

enum class GuessPolicy { previous_time, constant };
enum class GCarryPolicy { reinitialize, carry };
enum class StepOutcome { converged, diverged, stalled, solver_failure };

const char* to_string(StepOutcome outcome);

struct RunConfig {
  SchemeKind scheme = SchemeKind::ldd;
  SchemeParams params;
  double inner_tolerance = 1e-6;  // stopping criterion on l2_increment
  int max_inner_iterations = 200;
  double divergence_factor = 1e6;  // vs the first increment
  // an iteration that produces no new minimum of the increment for this many
  // consecutive iterations (while well above the tolerance) counts as
  // divergent; catches bounded oscillations that never explode
  int stagnation_window = 30;
  double t_begin = 0.0;
  double t_end = 0.1;
  GuessPolicy guess_policy = GuessPolicy::previous_time;
  double guess_value = -5.0;
  GCarryPolicy g_policy = GCarryPolicy::reinitialize;
  GmresOptions gmres;
  std::optional<bool> jacobi;  // default: on for monolithic schemes, off for LDD
  int threads = 1;

  /// Per-iteration system sink (matrix dumps). block: 0 = monolithic,
  /// 1 = Omega1, 2 = Omega2. May be called from two threads at once when the
  /// subdomain solves run concurrently.
  std::function<void(int step, int iteration, int block, const SubdomainSystem&)> matrix_sink;

  bool effective_jacobi() const { return jacobi.value_or(scheme != SchemeKind::ldd); }
  void validate() const;
};

struct StepReport {
  int step = 0;
  double time = 0.0;  // time at the end of the step
  int inner_iterations = 0;
  StepOutcome outcome = StepOutcome::converged;
  std::vector<IterationReport> iterations;
  double max_relative_error = std::numeric_limits<double>::quiet_NaN();
  Index gmres_total = 0;

  std::vector<double> l2_increment_series() const;
  std::vector<double> g_increment_series() const;
};

struct TransientReport {
  std::vector<StepReport> steps;
  bool all_converged = true;
  int first_failed_step = -1;
  StepOutcome failure = StepOutcome::converged;
  Index cumulative_gmres = 0;
  double final_time = 0.0;
  DomainField final_pressure;
  InterfaceState final_interface;
  // max |(p_exact - p)/p_exact| of the final state (exact cases only)
  double final_relative_error = std::numeric_limits<double>::quiet_NaN();
};

/// Evolving state of a transient run.
struct SolveState {
  DomainField pressure;
  InterfaceState interface;
  bool interface_valid = false;
  double time = 0.0;
};

SolveState initial_state(const DecomposedGrid& grid, const Problem& problem, double t_begin);

/// One backward-Euler step of the domain-decomposition iteration. Advances
/// the state only on convergence; on failure the partial iteration reports
/// are returned and the state is untouched.
StepReport ldd_time_step(SolveState& state, const DecomposedGrid& grid, const Problem& problem,
                         const RunConfig& config, double dt, int step_index);

/// One backward-Euler step of a monolithic scheme (LFV, Picard or Newton).
StepReport monolithic_time_step(SolveState& state, const DecomposedGrid& grid,
                                const Problem& problem, const RunConfig& config, double dt,
                                int step_index);

/// Optional CSV sinks for run_transient. Column layouts:
///   iteration log: step,time,iter,l2_inc,linf_inc,p_jump,flux_jump,g_inc,gmres_iters
///   step summary:  step,time,inner_iters,converged
///   profile:       x,p_num,p_exact,rel_err   (cells nearest y = 0.5, final time)
struct RunWriters {
  std::ostream* iteration_log = nullptr;
  std::ostream* step_summary = nullptr;
  std::ostream* profile = nullptr;
};

TransientReport run_transient(const DecomposedGrid& grid, const Problem& problem,
                              const RunConfig& config, const RunWriters* writers = nullptr);

struct ContractionRates {
  double arithmetic = 0.0;
  double geometric = 0.0;  // over the first min(20, available) ratios
};

/// Average ratios of consecutive entries of a positive error series; ratios
/// are truncated at the first zero entry.
ContractionRates contraction_rate(const std::vector<double>& series);

/// Norm bookkeeping from per-face interface data.
IterationReport error_metrics(const DecomposedGrid& grid, const DomainField& current,
                              const DomainField& previous, const Vector& pressure_jump_per_face,
                              const Vector& flux_jump_per_face,
                              const Vector& g_increment_per_face);

/// max |(p_exact - p)/p_exact| over cells, skipping |p_exact| < guard.
double max_relative_error(const DecomposedGrid& grid, const Problem& problem,
                          const DomainField& p, double t, double guard = 1e-12);

struct ProfileSample {
  double x;
  double p_num;
  double p_exact;
  double rel_err;
};

/// Solution profile along the cell row whose centers are nearest y_target.
std::vector<ProfileSample> midline_profile(const DecomposedGrid& grid, const Problem& problem,
                                           const DomainField& p, double t,
                                           double y_target = 0.5);

}  // namespace lddflow

#endif
