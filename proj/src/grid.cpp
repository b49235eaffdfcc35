#include "lddflow/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace lddflow {

namespace {

// Number of cells of size h in an extent, requiring an exact division.
int exact_cell_count(double extent, double h, const char* what) {
  if (!(h > 0.0)) throw std::invalid_argument(std::string("build_grid: nonpositive ") + what);
  const double ratio = extent / h;
  const int n = static_cast<int>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - n) > 1e-12 * std::max(1.0, std::abs(ratio)))
    throw std::invalid_argument(std::string("build_grid: ") + what +
                                " does not divide the extent into whole cells");
  return n;
}

}  // namespace

DecomposedGrid::DecomposedGrid(const GridSpec& spec, int n1x, int n2x, int ny)
    : spec_(spec), n1x_(n1x), n2x_(n2x), ny_(ny) {}

DecomposedGrid build_grid(const GridSpec& spec) {
  if (!(spec.x_min < spec.x_split && spec.x_split < spec.x_max))
    throw std::invalid_argument("build_grid: need x_min < x_split < x_max");
  if (!(spec.y_min < spec.y_max)) throw std::invalid_argument("build_grid: need y_min < y_max");
  const int n1x = exact_cell_count(spec.x_split - spec.x_min, spec.dx, "dx");
  const int n2x = exact_cell_count(spec.x_max - spec.x_split, spec.dx, "dx");
  const int ny = exact_cell_count(spec.y_max - spec.y_min, spec.dy, "dy");
  return DecomposedGrid(spec, n1x, n2x, ny);
}

std::vector<InterfacePair> interface_pairing(const DecomposedGrid& grid) {
  std::vector<InterfacePair> pairs;
  pairs.reserve(grid.ny());
  for (int iy = 0; iy < grid.ny(); ++iy) {
    pairs.push_back({grid.cell_index(Subdomain::omega1, grid.nx(Subdomain::omega1) - 1, iy),
                     grid.cell_index(Subdomain::omega2, 0, iy), grid.interface_face_y(iy)});
  }
  return pairs;
}

DomainField make_field(const DecomposedGrid& grid, double value) {
  DomainField f;
  f.omega1 = Vector::Constant(grid.cells(Subdomain::omega1), value);
  f.omega2 = Vector::Constant(grid.cells(Subdomain::omega2), value);
  return f;
}

DomainField sample_field(const DecomposedGrid& grid,
                         const std::function<double(Subdomain, double, double)>& f) {
  DomainField out = make_field(grid);
  for (Subdomain l : {Subdomain::omega1, Subdomain::omega2}) {
    for (int iy = 0; iy < grid.ny(); ++iy)
      for (int ix = 0; ix < grid.nx(l); ++ix)
        out[l][grid.cell_index(l, ix, iy)] =
            f(l, grid.cell_center_x(l, ix), grid.cell_center_y(iy));
  }
  return out;
}

double l2_cell_norm(const DecomposedGrid& grid, const Vector& values) {
  return std::sqrt(values.squaredNorm() * grid.cell_area());
}

double l2_cell_norm(const DecomposedGrid& grid, const DomainField& field) {
  if (field.omega1.size() != grid.cells(Subdomain::omega1) ||
      field.omega2.size() != grid.cells(Subdomain::omega2))
    throw std::invalid_argument("l2_cell_norm: field length does not match grid");
  return std::sqrt((field.omega1.squaredNorm() + field.omega2.squaredNorm()) * grid.cell_area());
}

double linf_cell_norm(const Vector& values) {
  return values.size() == 0 ? 0.0 : values.cwiseAbs().maxCoeff();
}

double linf_cell_norm(const DomainField& field) {
  return std::max(linf_cell_norm(field.omega1), linf_cell_norm(field.omega2));
}

double l2_interface_norm(const DecomposedGrid& grid, const Vector& face_values) {
  if (face_values.size() != grid.ny())
    throw std::invalid_argument("l2_interface_norm: expected one value per interface face");
  return std::sqrt(face_values.squaredNorm() * grid.dy());
}

void BoundarySpec::validate() const {
  const auto require = [&](Subdomain l, Side s) {
    if (!at(l, s))
      throw std::invalid_argument("BoundarySpec: uncovered exterior side");
    if (!at(l, s)->value) throw std::invalid_argument("BoundarySpec: side has no value function");
  };
  require(Subdomain::omega1, Side::west);
  require(Subdomain::omega1, Side::south);
  require(Subdomain::omega1, Side::north);
  require(Subdomain::omega2, Side::east);
  require(Subdomain::omega2, Side::south);
  require(Subdomain::omega2, Side::north);
  if (at(Subdomain::omega1, Side::east) || at(Subdomain::omega2, Side::west))
    throw std::invalid_argument("BoundarySpec: interface side must not carry boundary data");
}

}  // namespace lddflow
