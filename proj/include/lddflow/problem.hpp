#ifndef LDDFLOW_PROBLEM_HPP
#define LDDFLOW_PROBLEM_HPP

#include <array>
#include <functional>

#include "lddflow/constitutive.hpp"
#include "lddflow/grid.hpp"

namespace lddflow {

/// Everything the assembly needs to know about a flow problem: the material
/// laws per subdomain, boundary data, source, gravity and (optionally) the
/// exact solution. The flux is F = -k grad(psi) with the total potential
/// psi = p + gravity_potential(x, y).
struct Problem {
  std::array<ConstitutiveModel, 2> models{PowerLawModel(1), PowerLawModel(2)};
  BoundarySpec bc;
  std::function<double(Subdomain, double, double, double)> source;  // (l, x, y, t)
  std::function<double(double, double)> gravity_potential;          // zeta(x, y); empty = 0
  std::function<double(Subdomain, double, double)> initial;         // p at t = t0
  std::function<double(Subdomain, double, double, double)> exact;   // optional

  const ConstitutiveModel& model(Subdomain l) const { return models[side_index(l)]; }

  double zeta(double x, double y) const {
    return gravity_potential ? gravity_potential(x, y) : 0.0;
  }
  double source_at(Subdomain l, double x, double y, double t) const {
    return source ? source(l, x, y, t) : 0.0;
  }
  bool has_exact() const { return static_cast<bool>(exact); }
};

}  // namespace lddflow

#endif
