#ifndef LDDFLOW_ASSEMBLY_HPP
#define LDDFLOW_ASSEMBLY_HPP

#include <array>
#include <string>

#include "lddflow/linalg.hpp"
#include "lddflow/problem.hpp"

namespace lddflow {

/// How the Robin coupling at the interface is written. The lambda form
/// F.n = g + lambda p, the convex combination F.n = (1-eta) g + eta p and
/// the generalised form F.n = M [(1-eta) g + eta p] are all special cases of
/// the latter; internally everything runs through the generalised
/// coefficients.
struct Formulation {
  enum class Kind { lambda, convex, generalized };
  Kind kind = Kind::lambda;
  double lambda = 1.0;
  double eta = 0.5;
  double m_scale = 1.0;

  static Formulation lambda_form(double lambda);
  static Formulation convex(double eta);
  static Formulation generalized(double m_scale, double eta);
};

/// Effective coefficients of the generalised decoupling. `weight` is the
/// coefficient of the interface pressure in the Robin condition (M eta; the
/// lambda of the lambda formulation).
struct RobinCoefficients {
  double eta;
  double m_scale;
  double weight;
};

RobinCoefficients robin_coefficients(const Formulation& f);

/// Iteration parameters: stabilization constants, time step and interface
/// formulation.
struct SchemeParams {
  double stabilization1 = 0.25;  // L_1
  double stabilization2 = 0.25;  // L_2
  double tau = 0.01;
  Formulation formulation = Formulation::lambda_form(1.0);

  double stabilization(Subdomain l) const {
    return l == Subdomain::omega1 ? stabilization1 : stabilization2;
  }
  void validate() const;
};

/// Robin data and pressure traces on the interface, one entry per face and
/// side. `g` holds the effective datum (1-eta) g_l of the generalised
/// formulation; for the lambda formulation that is g_l / (1 + lambda).
struct InterfaceState {
  std::array<Vector, 2> g;
  std::array<Vector, 2> trace;

  /// Robin data in the units of the lambda formulation, g_l = stored / (1-eta).
  Vector true_g(Subdomain l, const RobinCoefficients& c) const {
    return g[side_index(l)] / (1.0 - c.eta);
  }
};

/// Linear system for one scheme iteration on one subdomain or the whole
/// domain. For Newton systems the unknown is the increment delta p.
struct SubdomainSystem {
  TripletMatrix matrix;
  Vector rhs;
  bool solves_increment = false;
  std::string ordering;
};

enum class SchemeKind { ldd, lfv, picard, newton };

enum class Axis { x, y };

/// Integrated transmissibility of a face: the harmonic combination of the
/// half-cell transmissibilities mob * (face length) / (half cell distance).
/// Returns 0 when both mobilities vanish.
double face_transmissibility(const DecomposedGrid& grid, double mobility_left,
                             double mobility_right, Axis axis);

/// Frozen cell mobilities of subdomain l at the given pressures.
Vector cell_mobilities(const DecomposedGrid& grid, const Problem& problem, Subdomain l,
                       const Vector& p);

/// Interface pressure from the one-sided Robin closure
///   -(mobility/half_dist) (p_gamma + dz - p_cell) = g + lambda p_gamma,
/// i.e. p_gamma = (k p_cell - k dz - g) / (k + lambda) with k = mobility/half_dist
/// and dz the gravity-potential increase from cell center to face.
double interface_trace(double p_cell, double g, double lambda, double mobility,
                       double half_dist, double gravity_increment);

/// Per-face flux intensities (flux per unit face length, oriented +x / +y).
/// Vertical faces of subdomain l are indexed iy * (nx+1) + i with i = 0 the
/// west boundary column; horizontal faces j * nx + ix with j = 0 the south
/// boundary row. The interface column appears in both subdomains with the
/// same two-sided value.
struct FluxField {
  std::array<Vector, 2> fx;
  std::array<Vector, 2> fy;

  const Vector& x_faces(Subdomain l) const { return fx[side_index(l)]; }
  const Vector& y_faces(Subdomain l) const { return fy[side_index(l)]; }
};

FluxField flux_field(const DecomposedGrid& grid, const Problem& problem, const DomainField& p,
                     double t);

/// Starts the interface data from a previous-time solution:
/// g_l = F.n_l - lambda p|_Gamma in effective storage, traces set to the
/// two-sided TPFA trace of that solution.
InterfaceState init_interface(const DecomposedGrid& grid, const Problem& problem,
                              const DomainField& p_previous_time, const Formulation& f);

/// One sweep of the interface update: g_l <- -2 eta trace_{3-l} - g_{3-l}
/// (effective form). Both sides read the old values.
InterfaceState update_g(const InterfaceState& state, const RobinCoefficients& c);

/// Linearised subdomain system of the domain-decomposition iteration:
/// L_l accumulation, TPFA diffusion with mobilities frozen at p_iter_prev,
/// Robin interface closure with datum g_l, Dirichlet/Neumann data at time t.
SubdomainSystem assemble_ldd(const DecomposedGrid& grid, const Problem& problem, Subdomain l,
                             const Vector& p_iter_prev, const Vector& p_time_prev,
                             const Vector& g_l, const SchemeParams& params, double t);

/// Full-domain system for the monolithic schemes. The interface faces are
/// interior TPFA faces with per-side mobilities, so flux continuity holds by
/// construction. LFV uses the L_l accumulation, Picard the S' accumulation,
/// Newton assembles the Jacobian (including the mobility-derivative term on
/// the frozen potential gradient) and the right hand side -residual.
SubdomainSystem assemble_monolithic(SchemeKind kind, const DecomposedGrid& grid,
                                    const Problem& problem, const DomainField& p_iter_prev,
                                    const DomainField& p_time_prev, const SchemeParams& params,
                                    double t);

/// Newton data for boundary faces: previous-iterate potential and mobility
/// derivatives of the boundary cells.
struct BcNewtonData {
  const Vector* psi_prev;
  const Vector* mobility_derivative;
};

/// Adds the exterior boundary-face contributions of subdomain l. Dirichlet
/// data enters through the half-cell transmissibility to the face value;
/// Neumann data (inflow per unit length) is added to the right hand side.
void apply_bc(SubdomainSystem& system, const DecomposedGrid& grid, const Problem& problem,
              Subdomain l, const Vector& mobility, double tau, double t, Index row_offset,
              const BcNewtonData* newton = nullptr);

}  // namespace lddflow

#endif
