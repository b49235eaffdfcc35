#include "lddflow/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace lddflow {

Formulation Formulation::lambda_form(double lambda) {
  Formulation f;
  f.kind = Kind::lambda;
  f.lambda = lambda;
  return f;
}

Formulation Formulation::convex(double eta) {
  Formulation f;
  f.kind = Kind::convex;
  f.eta = eta;
  return f;
}

Formulation Formulation::generalized(double m_scale, double eta) {
  Formulation f;
  f.kind = Kind::generalized;
  f.m_scale = m_scale;
  f.eta = eta;
  return f;
}

RobinCoefficients robin_coefficients(const Formulation& f) {
  switch (f.kind) {
    case Formulation::Kind::lambda:
      if (!(f.lambda > 0.0))
        throw std::invalid_argument("Formulation: lambda must be positive");
      return {f.lambda / (1.0 + f.lambda), 1.0 + f.lambda, f.lambda};
    case Formulation::Kind::convex:
      if (!(f.eta > 0.0 && f.eta < 1.0))
        throw std::invalid_argument("Formulation: eta must lie in (0,1)");
      return {f.eta, 1.0, f.eta};
    case Formulation::Kind::generalized:
      if (!(f.eta > 0.0 && f.eta < 1.0))
        throw std::invalid_argument("Formulation: eta must lie in (0,1)");
      if (!(f.m_scale > 0.0))
        throw std::invalid_argument("Formulation: M must be positive");
      return {f.eta, f.m_scale, f.m_scale * f.eta};
  }
  throw std::logic_error("Formulation: unknown kind");
}

void SchemeParams::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("SchemeParams: tau must be positive");
  robin_coefficients(formulation);
}

double face_transmissibility(const DecomposedGrid& grid, double mobility_left,
                             double mobility_right, Axis axis) {
  if (mobility_left < 0.0 || mobility_right < 0.0)
    throw std::invalid_argument("face_transmissibility: negative mobility");
  const double c = axis == Axis::x ? 2.0 * grid.dy() / grid.dx() : 2.0 * grid.dx() / grid.dy();
  const double ta = mobility_left * c;
  const double tb = mobility_right * c;
  const double sum = ta + tb;
  return sum > 0.0 ? ta * tb / sum : 0.0;
}

Vector cell_mobilities(const DecomposedGrid& grid, const Problem& problem, Subdomain l,
                       const Vector& p) {
  Vector mob(grid.cells(l));
  const auto& model = problem.model(l);
  for (Index i = 0; i < mob.size(); ++i) mob(i) = mobility(model, p(i));
  return mob;
}

double interface_trace(double p_cell, double g, double lambda, double mobility,
                       double half_dist, double gravity_increment) {
  if (mobility < 0.0) throw std::invalid_argument("interface_trace: negative mobility");
  const double k = mobility / half_dist;
  return (k * p_cell - k * gravity_increment - g) / (k + lambda);
}

namespace {

double harmonic(double a, double b) {
  const double s = a + b;
  return s > 0.0 ? a * b / s : 0.0;
}

// Per-cell data of one subdomain used by the assemblers.
struct CellArrays {
  Vector zeta;       // gravity potential at cell centers
  Vector mob;        // frozen mobility at the previous iterate
  Vector mob_deriv;  // d(mobility)/dp, Newton only
  Vector psi;        // previous-iterate total potential, Newton only
};

CellArrays make_cell_arrays(const DecomposedGrid& grid, const Problem& problem, Subdomain l,
                            const Vector& p_prev, bool newton) {
  CellArrays c;
  const Index n = grid.cells(l);
  c.zeta.resize(n);
  c.mob.resize(n);
  if (newton) {
    c.mob_deriv.resize(n);
    c.psi.resize(n);
  }
  const auto& model = problem.model(l);
  for (int iy = 0; iy < grid.ny(); ++iy) {
    const double y = grid.cell_center_y(iy);
    for (int ix = 0; ix < grid.nx(l); ++ix) {
      const Index i = grid.cell_index(l, ix, iy);
      c.zeta(i) = problem.zeta(grid.cell_center_x(l, ix), y);
      c.mob(i) = mobility(model, p_prev(i));
      if (newton) {
        c.mob_deriv(i) = mobility_derivative(model, p_prev(i));
        c.psi(i) = p_prev(i) + c.zeta(i);
      }
    }
  }
  return c;
}

// Interior face, schemes that are linear in the new pressure.
void add_face_linear(SubdomainSystem& sys, Index ra, Index rb, double tau, double transmis,
                     double zeta_a, double zeta_b) {
  sys.matrix.add(ra, ra, tau * transmis);
  sys.matrix.add(ra, rb, -tau * transmis);
  sys.matrix.add(rb, rb, tau * transmis);
  sys.matrix.add(rb, ra, -tau * transmis);
  const double grav = tau * transmis * (zeta_a - zeta_b);
  sys.rhs(ra) -= grav;
  sys.rhs(rb) += grav;
}

// Interior face, Newton: exact Jacobian of the flux through the harmonic
// transmissibility plus the -residual right hand side.
void add_face_newton(SubdomainSystem& sys, Index ra, Index rb, double tau, double ta, double tb,
                     double ca, double cb, double da, double db, double psi_a, double psi_b) {
  const double sum = ta + tb;
  const double transmis = sum > 0.0 ? ta * tb / sum : 0.0;
  const double d_transmis_a = sum > 0.0 ? ca * (tb / sum) * (tb / sum) : 0.0;
  const double d_transmis_b = sum > 0.0 ? cb * (ta / sum) * (ta / sum) : 0.0;
  const double dpsi = psi_a - psi_b;
  const double jaa = tau * (transmis + d_transmis_a * da * dpsi);
  const double jab = tau * (-transmis + d_transmis_b * db * dpsi);
  sys.matrix.add(ra, ra, jaa);
  sys.matrix.add(ra, rb, jab);
  sys.matrix.add(rb, ra, -jaa);
  sys.matrix.add(rb, rb, -jab);
  const double q = tau * transmis * dpsi;
  sys.rhs(ra) -= q;
  sys.rhs(rb) += q;
}

// Accumulation, source and the faces interior to one subdomain.
void assemble_subdomain(SchemeKind kind, SubdomainSystem& sys, const DecomposedGrid& grid,
                        const Problem& problem, Subdomain l, const Vector& p_prev,
                        const Vector& p_time, const CellArrays& cells, const SchemeParams& params,
                        double t, Index offset) {
  const bool newton = kind == SchemeKind::newton;
  const double tau = params.tau;
  const double volume = grid.cell_area();
  const auto& model = problem.model(l);

  for (int iy = 0; iy < grid.ny(); ++iy) {
    const double y = grid.cell_center_y(iy);
    for (int ix = 0; ix < grid.nx(l); ++ix) {
      const Index i = grid.cell_index(l, ix, iy);
      const Index r = offset + i;
      double coef;
      switch (kind) {
        case SchemeKind::ldd:
        case SchemeKind::lfv:
          coef = params.stabilization(l);
          break;
        default:
          coef = accumulation_derivative(model, p_prev(i));
      }
      sys.matrix.add(r, r, volume * coef);
      const double f = problem.source_at(l, grid.cell_center_x(l, ix), y, t);
      const double dacc = accumulation(model, p_prev(i)) - accumulation(model, p_time(i));
      if (newton)
        sys.rhs(r) += tau * volume * f - volume * dacc;
      else
        sys.rhs(r) += volume * coef * p_prev(i) - volume * dacc + tau * volume * f;
    }
  }

  const double cx = 2.0 * grid.dy() / grid.dx();
  const double cy = 2.0 * grid.dx() / grid.dy();
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 1; ix < grid.nx(l); ++ix) {
      const Index a = grid.cell_index(l, ix - 1, iy);
      const Index b = grid.cell_index(l, ix, iy);
      if (newton)
        add_face_newton(sys, offset + a, offset + b, tau, cells.mob(a) * cx, cells.mob(b) * cx,
                        cx, cx, cells.mob_deriv(a), cells.mob_deriv(b), cells.psi(a),
                        cells.psi(b));
      else
        add_face_linear(sys, offset + a, offset + b, tau,
                        harmonic(cells.mob(a) * cx, cells.mob(b) * cx), cells.zeta(a),
                        cells.zeta(b));
    }
  }
  for (int iy = 1; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(l); ++ix) {
      const Index a = grid.cell_index(l, ix, iy - 1);
      const Index b = grid.cell_index(l, ix, iy);
      if (newton)
        add_face_newton(sys, offset + a, offset + b, tau, cells.mob(a) * cy, cells.mob(b) * cy,
                        cy, cy, cells.mob_deriv(a), cells.mob_deriv(b), cells.psi(a),
                        cells.psi(b));
      else
        add_face_linear(sys, offset + a, offset + b, tau,
                        harmonic(cells.mob(a) * cy, cells.mob(b) * cy), cells.zeta(a),
                        cells.zeta(b));
    }
  }

  const BcNewtonData newton_data{&cells.psi, &cells.mob_deriv};
  apply_bc(sys, grid, problem, l, cells.mob, tau, t, offset, newton ? &newton_data : nullptr);
}

}  // namespace

void apply_bc(SubdomainSystem& system, const DecomposedGrid& grid, const Problem& problem,
              Subdomain l, const Vector& mobility, double tau, double t, Index row_offset,
              const BcNewtonData* newton) {
  // One exterior face: owning cell, face center, face length, center-to-face
  // distance and the cell center (for the gravity potential).
  const auto process = [&](Side side, Index cell, double face_x, double face_y, double face_len,
                           double half_dist, double cell_x, double cell_y) {
    const auto& condition = problem.bc.at(l, side);
    if (!condition) throw std::invalid_argument("apply_bc: uncovered exterior side");
    const Index r = row_offset + cell;
    if (condition->kind == BcKind::neumann) {
      // prescribed inflow per unit face length
      system.rhs(r) += tau * condition->value(face_x, face_y, t) * face_len;
      return;
    }
    const double psi_b = condition->value(face_x, face_y, t) + problem.zeta(face_x, face_y);
    const double c = face_len / half_dist;
    const double t_half = mobility(cell) * c;
    if (newton) {
      const double dpsi = (*newton->psi_prev)(cell) - psi_b;
      system.matrix.add(r, r, tau * (t_half + c * (*newton->mobility_derivative)(cell) * dpsi));
      system.rhs(r) -= tau * t_half * dpsi;
    } else {
      system.matrix.add(r, r, tau * t_half);
      system.rhs(r) += tau * t_half * (psi_b - problem.zeta(cell_x, cell_y));
    }
  };

  const double half_x = 0.5 * grid.dx();
  const double half_y = 0.5 * grid.dy();
  if (l == Subdomain::omega1) {
    for (int iy = 0; iy < grid.ny(); ++iy)
      process(Side::west, grid.cell_index(l, 0, iy), grid.x_min(), grid.cell_center_y(iy),
              grid.dy(), half_x, grid.cell_center_x(l, 0), grid.cell_center_y(iy));
  } else {
    const int last = grid.nx(l) - 1;
    for (int iy = 0; iy < grid.ny(); ++iy)
      process(Side::east, grid.cell_index(l, last, iy), grid.x_max(), grid.cell_center_y(iy),
              grid.dy(), half_x, grid.cell_center_x(l, last), grid.cell_center_y(iy));
  }
  for (int ix = 0; ix < grid.nx(l); ++ix) {
    const double x = grid.cell_center_x(l, ix);
    process(Side::south, grid.cell_index(l, ix, 0), x, grid.y_min(), grid.dx(), half_y, x,
            grid.cell_center_y(0));
    process(Side::north, grid.cell_index(l, ix, grid.ny() - 1), x, grid.y_max(), grid.dx(),
            half_y, x, grid.cell_center_y(grid.ny() - 1));
  }
}

SubdomainSystem assemble_ldd(const DecomposedGrid& grid, const Problem& problem, Subdomain l,
                             const Vector& p_iter_prev, const Vector& p_time_prev,
                             const Vector& g_l, const SchemeParams& params, double t) {
  if (!(params.stabilization(l) > 0.0))
    throw std::invalid_argument("assemble_ldd: stabilization constant must be positive");
  params.validate();
  const RobinCoefficients robin = robin_coefficients(params.formulation);

  const Index n = grid.cells(l);
  if (p_iter_prev.size() != n || p_time_prev.size() != n || g_l.size() != grid.ny())
    throw std::invalid_argument("assemble_ldd: field size mismatch");

  SubdomainSystem sys;
  sys.matrix = TripletMatrix(n, n);
  sys.matrix.entries.reserve(static_cast<size_t>(5 * n));
  sys.rhs = Vector::Zero(n);
  sys.ordering = l == Subdomain::omega1 ? "cells of Omega1, row-major (x fastest)"
                                        : "cells of Omega2, row-major (x fastest)";

  const CellArrays cells = make_cell_arrays(grid, problem, l, p_iter_prev, false);
  assemble_subdomain(SchemeKind::ldd, sys, grid, problem, l, p_iter_prev, p_time_prev, cells,
                     params, t, 0);

  // Robin closure on the interface column; the face pressure is eliminated.
  const double tau = params.tau;
  const double half_x = 0.5 * grid.dx();
  const int ix = l == Subdomain::omega1 ? grid.nx(l) - 1 : 0;
  for (int iy = 0; iy < grid.ny(); ++iy) {
    const Index cell = grid.cell_index(l, ix, iy);
    const double y = grid.interface_face_y(iy);
    const double k = cells.mob(cell) / half_x;
    const double datum = robin.m_scale * g_l(iy);
    const double dz = problem.zeta(grid.x_split(), y) - cells.zeta(cell);
    const double denom = k + robin.weight;
    sys.matrix.add(cell, cell, tau * grid.dy() * k * robin.weight / denom);
    sys.rhs(cell) -= tau * grid.dy() * k * (datum - robin.weight * dz) / denom;
  }
  return sys;
}

SubdomainSystem assemble_monolithic(SchemeKind kind, const DecomposedGrid& grid,
                                    const Problem& problem, const DomainField& p_iter_prev,
                                    const DomainField& p_time_prev, const SchemeParams& params,
                                    double t) {
  if (kind == SchemeKind::ldd)
    throw std::invalid_argument("assemble_monolithic: use assemble_ldd for the DD scheme");
  if (!(params.tau > 0.0))
    throw std::invalid_argument("assemble_monolithic: tau must be positive");
  if (kind == SchemeKind::lfv &&
      (!(params.stabilization1 > 0.0) || !(params.stabilization2 > 0.0)))
    throw std::invalid_argument("assemble_monolithic: stabilization constants must be positive");

  const bool newton = kind == SchemeKind::newton;
  const Index n = grid.total_cells();
  SubdomainSystem sys;
  sys.matrix = TripletMatrix(n, n);
  sys.matrix.entries.reserve(static_cast<size_t>(5 * n));
  sys.rhs = Vector::Zero(n);
  sys.solves_increment = newton;
  sys.ordering = "Omega1 block then Omega2 block, row-major (x fastest)";

  std::array<CellArrays, 2> cells = {
      make_cell_arrays(grid, problem, Subdomain::omega1, p_iter_prev.omega1, newton),
      make_cell_arrays(grid, problem, Subdomain::omega2, p_iter_prev.omega2, newton)};

  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2})
    assemble_subdomain(kind, sys, grid, problem, l, p_iter_prev[l], p_time_prev[l],
                       cells[side_index(l)], params, t, grid.monolithic_offset(l));

  // interface faces: interior TPFA faces with per-side mobilities
  const double cx = 2.0 * grid.dy() / grid.dx();
  const auto& c1 = cells[0];
  const auto& c2 = cells[1];
  for (const auto& pair : interface_pairing(grid)) {
    const Index ra = grid.monolithic_offset(Subdomain::omega1) + pair.cell_omega1;
    const Index rb = grid.monolithic_offset(Subdomain::omega2) + pair.cell_omega2;
    if (newton)
      add_face_newton(sys, ra, rb, params.tau, c1.mob(pair.cell_omega1) * cx,
                      c2.mob(pair.cell_omega2) * cx, cx, cx, c1.mob_deriv(pair.cell_omega1),
                      c2.mob_deriv(pair.cell_omega2), c1.psi(pair.cell_omega1),
                      c2.psi(pair.cell_omega2));
    else
      add_face_linear(sys, ra, rb, params.tau,
                      harmonic(c1.mob(pair.cell_omega1) * cx, c2.mob(pair.cell_omega2) * cx),
                      c1.zeta(pair.cell_omega1), c2.zeta(pair.cell_omega2));
  }
  return sys;
}

FluxField flux_field(const DecomposedGrid& grid, const Problem& problem, const DomainField& p,
                     double t) {
  FluxField out;
  const double half_x = 0.5 * grid.dx();
  const double half_y = 0.5 * grid.dy();

  std::array<CellArrays, 2> cells = {
      make_cell_arrays(grid, problem, Subdomain::omega1, p.omega1, false),
      make_cell_arrays(grid, problem, Subdomain::omega2, p.omega2, false)};
  std::array<Vector, 2> psi;
  for (int s = 0; s < 2; ++s) psi[s] = p[subdomain_of(s)] + cells[s].zeta;

  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    const int s = side_index(l);
    const int nx = grid.nx(l);
    const int ny = grid.ny();
    out.fx[s] = Vector::Zero(static_cast<Index>(nx + 1) * ny);
    out.fy[s] = Vector::Zero(static_cast<Index>(nx) * (ny + 1));

    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 1; ix < nx; ++ix) {
        const Index a = grid.cell_index(l, ix - 1, iy);
        const Index b = grid.cell_index(l, ix, iy);
        const double th = harmonic(cells[s].mob(a) / half_x, cells[s].mob(b) / half_x);
        out.fx[s](static_cast<Index>(iy) * (nx + 1) + ix) = th * (psi[s](a) - psi[s](b));
      }
    }
    for (int iy = 1; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const Index a = grid.cell_index(l, ix, iy - 1);
        const Index b = grid.cell_index(l, ix, iy);
        const double th = harmonic(cells[s].mob(a) / half_y, cells[s].mob(b) / half_y);
        out.fy[s](static_cast<Index>(iy) * nx + ix) = th * (psi[s](a) - psi[s](b));
      }
    }
  }

  // interface column: two-sided harmonic flux, stored in both subdomains
  const int n1x = grid.nx(Subdomain::omega1);
  const int n2x = grid.nx(Subdomain::omega2);
  for (const auto& pair : interface_pairing(grid)) {
    const double th =
        harmonic(cells[0].mob(pair.cell_omega1) / half_x, cells[1].mob(pair.cell_omega2) / half_x);
    const double q = th * (psi[0](pair.cell_omega1) - psi[1](pair.cell_omega2));
    const int iy = static_cast<int>(pair.cell_omega1 / n1x);
    out.fx[0](static_cast<Index>(iy) * (n1x + 1) + n1x) = q;
    out.fx[1](static_cast<Index>(iy) * (n2x + 1) + 0) = q;
  }

  // exterior boundary faces
  for (int iy = 0; iy < grid.ny(); ++iy) {
    const double y = grid.cell_center_y(iy);
    {
      const Subdomain l = Subdomain::omega1;
      const Index cell = grid.cell_index(l, 0, iy);
      const auto& condition = problem.bc.at(l, Side::west);
      if (!condition) throw std::invalid_argument("flux_field: uncovered exterior side");
      double f;
      if (condition->kind == BcKind::neumann)
        f = condition->value(grid.x_min(), y, t);  // inflow -> +x flux
      else {
        const double psi_b = condition->value(grid.x_min(), y, t) +
                             problem.zeta(grid.x_min(), y);
        f = -(cells[0].mob(cell) / half_x) * (psi[0](cell) - psi_b);
      }
      out.fx[0](static_cast<Index>(iy) * (n1x + 1) + 0) = f;
    }
    {
      const Subdomain l = Subdomain::omega2;
      const Index cell = grid.cell_index(l, n2x - 1, iy);
      const auto& condition = problem.bc.at(l, Side::east);
      if (!condition) throw std::invalid_argument("flux_field: uncovered exterior side");
      double f;
      if (condition->kind == BcKind::neumann)
        f = -condition->value(grid.x_max(), y, t);  // inflow -> -x flux
      else {
        const double psi_b = condition->value(grid.x_max(), y, t) +
                             problem.zeta(grid.x_max(), y);
        f = -(cells[1].mob(cell) / half_x) * (psi_b - psi[1](cell));
      }
      out.fx[1](static_cast<Index>(iy) * (n2x + 1) + n2x) = f;
    }
  }
  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    const int s = side_index(l);
    const int nx = grid.nx(l);
    for (int ix = 0; ix < nx; ++ix) {
      const double x = grid.cell_center_x(l, ix);
      {
        const auto& condition = problem.bc.at(l, Side::south);
        if (!condition) throw std::invalid_argument("flux_field: uncovered exterior side");
        const Index cell = grid.cell_index(l, ix, 0);
        double f;
        if (condition->kind == BcKind::neumann)
          f = condition->value(x, grid.y_min(), t);  // inflow -> +y flux
        else {
          const double psi_b =
              condition->value(x, grid.y_min(), t) + problem.zeta(x, grid.y_min());
          f = -(cells[s].mob(cell) / half_y) * (psi[s](cell) - psi_b);
        }
        out.fy[s](ix) = f;
      }
      {
        const auto& condition = problem.bc.at(l, Side::north);
        if (!condition) throw std::invalid_argument("flux_field: uncovered exterior side");
        const Index cell = grid.cell_index(l, ix, grid.ny() - 1);
        double f;
        if (condition->kind == BcKind::neumann)
          f = -condition->value(x, grid.y_max(), t);  // inflow -> -y flux
        else {
          const double psi_b =
              condition->value(x, grid.y_max(), t) + problem.zeta(x, grid.y_max());
          f = -(cells[s].mob(cell) / half_y) * (psi_b - psi[s](cell));
        }
        out.fy[s](static_cast<Index>(grid.ny()) * nx + ix) = f;
      }
    }
  }
  return out;
}

InterfaceState init_interface(const DecomposedGrid& grid, const Problem& problem,
                              const DomainField& p_previous_time, const Formulation& f) {
  const RobinCoefficients robin = robin_coefficients(f);
  const double half_x = 0.5 * grid.dx();

  InterfaceState state;
  for (int s = 0; s < 2; ++s) {
    state.g[s] = Vector::Zero(grid.ny());
    state.trace[s] = Vector::Zero(grid.ny());
  }

  const auto& model1 = problem.model(Subdomain::omega1);
  const auto& model2 = problem.model(Subdomain::omega2);
  for (const auto& pair : interface_pairing(grid)) {
    const int iy = static_cast<int>(pair.cell_omega1 / grid.nx(Subdomain::omega1));
    const double y = pair.face_y;
    const double x1 = grid.cell_center_x(Subdomain::omega1, grid.nx(Subdomain::omega1) - 1);
    const double x2 = grid.cell_center_x(Subdomain::omega2, 0);
    const double p1 = p_previous_time.omega1(pair.cell_omega1);
    const double p2 = p_previous_time.omega2(pair.cell_omega2);
    const double psi1 = p1 + problem.zeta(x1, y);
    const double psi2 = p2 + problem.zeta(x2, y);
    const double t1 = mobility(model1, p1) / half_x;
    const double t2 = mobility(model2, p2) / half_x;
    const double sum = t1 + t2;
    const double psi_face = sum > 0.0 ? (t1 * psi1 + t2 * psi2) / sum : 0.5 * (psi1 + psi2);
    const double q = harmonic(t1, t2) * (psi1 - psi2);  // F.n_1
    const double trace = psi_face - problem.zeta(grid.x_split(), y);
    state.trace[0](iy) = trace;
    state.trace[1](iy) = trace;
    state.g[0](iy) = q / robin.m_scale - robin.eta * trace;
    state.g[1](iy) = -q / robin.m_scale - robin.eta * trace;
  }
  return state;
}

InterfaceState update_g(const InterfaceState& state, const RobinCoefficients& c) {
  InterfaceState next = state;
  next.g[0] = -2.0 * c.eta * state.trace[1] - state.g[1];
  next.g[1] = -2.0 * c.eta * state.trace[0] - state.g[0];
  return next;
}

}  // namespace lddflow
