#ifndef LDDFLOW_GRID_HPP
#define LDDFLOW_GRID_HPP

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "lddflow/types.hpp"

namespace lddflow {

/// Geometry and resolution request for build_grid.
struct GridSpec {
  double x_min = -1.0;
  double x_split = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
  double dx = 0.1;
  double dy = 0.1;
};

/// Uniform cell-centered mesh over Omega = Omega1 u Omega2 with the vertical
/// interface Gamma = {x_split} x [y_min, y_max].
///
/// Cells are numbered row-major per subdomain: cell (ix, iy) has index
/// iy * nx(l) + ix, with x running fastest. In monolithic numbering Omega1
/// occupies indices [0, n1x*ny) followed by Omega2.
class DecomposedGrid {
 public:
  DecomposedGrid(const GridSpec& spec, int n1x, int n2x, int ny);

  double x_min() const { return spec_.x_min; }
  double x_split() const { return spec_.x_split; }
  double x_max() const { return spec_.x_max; }
  double y_min() const { return spec_.y_min; }
  double y_max() const { return spec_.y_max; }
  double dx() const { return spec_.dx; }
  double dy() const { return spec_.dy; }
  double cell_area() const { return spec_.dx * spec_.dy; }

  int nx(Subdomain l) const { return l == Subdomain::omega1 ? n1x_ : n2x_; }
  int ny() const { return ny_; }
  Index cells(Subdomain l) const { return static_cast<Index>(nx(l)) * ny_; }
  Index total_cells() const { return cells(Subdomain::omega1) + cells(Subdomain::omega2); }

  Index cell_index(Subdomain l, int ix, int iy) const {
    return static_cast<Index>(iy) * nx(l) + ix;
  }
  /// Offset of subdomain l in the monolithic numbering.
  Index monolithic_offset(Subdomain l) const {
    return l == Subdomain::omega1 ? 0 : cells(Subdomain::omega1);
  }

  double cell_center_x(Subdomain l, int ix) const {
    const double x0 = l == Subdomain::omega1 ? spec_.x_min : spec_.x_split;
    return x0 + (ix + 0.5) * spec_.dx;
  }
  double cell_center_y(int iy) const { return spec_.y_min + (iy + 0.5) * spec_.dy; }

  /// y-coordinate of the center of interface face `iy`.
  double interface_face_y(int iy) const { return cell_center_y(iy); }

 private:
  GridSpec spec_;
  int n1x_, n2x_, ny_;
};

/// Builds the grid, checking that dx and dy divide the subdomain extents
/// exactly (to 1e-12 relative).
DecomposedGrid build_grid(const GridSpec& spec);

/// One interface face: the Omega1 cell, the Omega2 cell and the face center.
struct InterfacePair {
  Index cell_omega1;
  Index cell_omega2;
  double face_y;
};

/// The ny interface faces ordered by increasing y. The Omega1 cell is in the
/// rightmost column, the Omega2 cell in the leftmost column of the same row.
std::vector<InterfacePair> interface_pairing(const DecomposedGrid& grid);

/// Cell-centered values of one subdomain, stored in grid order.
struct CellField {
  Subdomain subdomain = Subdomain::omega1;
  Vector values;
};

/// A field over the whole domain: one flat array per subdomain.
struct DomainField {
  Vector omega1;
  Vector omega2;

  const Vector& operator[](Subdomain l) const {
    return l == Subdomain::omega1 ? omega1 : omega2;
  }
  Vector& operator[](Subdomain l) { return l == Subdomain::omega1 ? omega1 : omega2; }
};

DomainField make_field(const DecomposedGrid& grid, double value = 0.0);

/// Samples f(x, y) at all cell centers.
DomainField sample_field(const DecomposedGrid& grid,
                         const std::function<double(Subdomain, double, double)>& f);

/// sqrt(sum v^2 dx dy) over the cells of one subdomain.
double l2_cell_norm(const DecomposedGrid& grid, const Vector& values);
/// sqrt(sum v^2 dx dy) over all cells of the domain.
double l2_cell_norm(const DecomposedGrid& grid, const DomainField& field);
double linf_cell_norm(const Vector& values);
double linf_cell_norm(const DomainField& field);
/// sqrt(sum v^2 dy) over the interface faces.
double l2_interface_norm(const DecomposedGrid& grid, const Vector& face_values);

/// Kind of boundary data on one exterior side.
enum class BcKind { dirichlet, neumann };

/// Exterior sides of a subdomain. For Omega1 `east` is the interface, for
/// Omega2 `west` is; those sides carry no boundary data.
enum class Side : int { west = 0, east = 1, south = 2, north = 3 };

/// Boundary data on one side: a value function of (x, y, t). Dirichlet values
/// are pressures at the face center; Neumann values are prescribed inflow
/// per unit face length (positive into the domain), so no-flow is value 0.
struct SideCondition {
  BcKind kind = BcKind::dirichlet;
  std::function<double(double, double, double)> value;
};

/// Boundary conditions for both subdomains. Every exterior side must be set
/// before assembly; the interface sides must stay empty.
struct BoundarySpec {
  std::array<std::array<std::optional<SideCondition>, 4>, 2> sides;

  const std::optional<SideCondition>& at(Subdomain l, Side s) const {
    return sides[side_index(l)][static_cast<int>(s)];
  }
  void set(Subdomain l, Side s, SideCondition c) {
    sides[side_index(l)][static_cast<int>(s)] = std::move(c);
  }
  /// Throws if an exterior side is missing or an interface side is set.
  void validate() const;
};

}  // namespace lddflow

#endif
