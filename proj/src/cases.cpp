#include "lddflow/cases.hpp"

#include <cmath>
#include <stdexcept>

namespace lddflow {

double manufactured_exact(Subdomain l, double x, double y, double t) {
  const double a = 1.0 + t * t;
  if (l == Subdomain::omega1) return 1.0 - a * (1.0 + x * x + y * y);
  return 1.0 - a * (1.0 + y * y);
}

double manufactured_source(Subdomain l, double x, double y, double t) {
  const double a = 1.0 + t * t;
  if (l == Subdomain::omega1) {
    const double b = 1.0 + x * x + y * y;
    return 4.0 / (b * b) - t / std::sqrt(a * a * a * b);
  }
  const double c = 1.0 + y * y;
  return 2.0 * (1.0 - y * y) / (c * c) - 2.0 * t / (3.0 * std::cbrt(a * a * a * a * c));
}

double manufactured_bc(Subdomain l, double x, double y, double t) {
  return manufactured_exact(l, x, y, t);
}

GridSpec benchmark_grid(double dx) {
  GridSpec spec;
  spec.x_min = -1.0;
  spec.x_split = 0.0;
  spec.x_max = 1.0;
  spec.y_min = 0.0;
  spec.y_max = 1.0;
  spec.dx = dx;
  spec.dy = dx;
  return spec;
}

Problem manufactured_case() {
  Problem p;
  p.models = {PowerLawModel(1), PowerLawModel(2)};
  p.source = manufactured_source;
  p.exact = manufactured_exact;
  p.initial = [](Subdomain l, double x, double y) { return manufactured_exact(l, x, y, 0.0); };

  const auto dirichlet = [](Subdomain l) {
    return SideCondition{BcKind::dirichlet, [l](double x, double y, double t) {
                           return manufactured_exact(l, x, y, t);
                         }};
  };
  p.bc.set(Subdomain::omega1, Side::west, dirichlet(Subdomain::omega1));
  p.bc.set(Subdomain::omega1, Side::south, dirichlet(Subdomain::omega1));
  p.bc.set(Subdomain::omega1, Side::north, dirichlet(Subdomain::omega1));
  p.bc.set(Subdomain::omega2, Side::east, dirichlet(Subdomain::omega2));
  p.bc.set(Subdomain::omega2, Side::south, dirichlet(Subdomain::omega2));
  p.bc.set(Subdomain::omega2, Side::north, dirichlet(Subdomain::omega2));
  return p;
}

VanGenuchtenSoil soil_from_head_units(double theta_r, double theta_s, double alpha_per_meter,
                                      double n_hat, double conductivity_m_per_day,
                                      const FluidProperties& fluid) {
  VanGenuchtenSoil soil;
  soil.theta_r = theta_r;
  soil.theta_s = theta_s;
  soil.alpha = alpha_per_meter / (fluid.density * fluid.gravity);
  soil.n_hat = n_hat;
  const double conductivity = conductivity_m_per_day / 86400.0;  // m/s
  soil.permeability = conductivity * fluid.viscosity / (fluid.density * fluid.gravity);
  return soil;
}

VanGenuchtenSoil silt_loam_ge3(const FluidProperties& fluid) {
  return soil_from_head_units(0.131, 0.396, 0.423, 2.06, 0.0496, fluid);
}

VanGenuchtenSoil hygiene_sandstone(const FluidProperties& fluid) {
  return soil_from_head_units(0.153, 0.250, 0.79, 10.4, 1.08, fluid);
}

ScaledSoil nondimensionalize(const VanGenuchtenSoil& soil, const CharacteristicScales& scales,
                             const FluidProperties& fluid) {
  if (scales.pressure == 0.0 || scales.length == 0.0 || scales.time == 0.0)
    throw std::invalid_argument("nondimensionalize: zero characteristic scale");
  const double p_star = std::abs(scales.pressure);
  ScaledSoil s;
  s.s_r = soil.theta_r / soil.theta_s;
  s.s_s = 1.0;
  s.alpha = soil.alpha * p_star;
  s.n_hat = soil.n_hat;
  s.mobility_scale =
      soil.permeability * p_star * scales.time / (fluid.viscosity * scales.length * scales.length);
  s.porosity = soil.theta_s;
  return s;
}

VanGenuchtenSoil redimensionalize(const ScaledSoil& scaled, const CharacteristicScales& scales,
                                  const FluidProperties& fluid) {
  if (scales.pressure == 0.0 || scales.length == 0.0 || scales.time == 0.0)
    throw std::invalid_argument("redimensionalize: zero characteristic scale");
  const double p_star = std::abs(scales.pressure);
  VanGenuchtenSoil soil;
  soil.theta_s = scaled.porosity;
  soil.theta_r = scaled.s_r * scaled.porosity;
  soil.alpha = scaled.alpha / p_star;
  soil.n_hat = scaled.n_hat;
  soil.permeability =
      scaled.mobility_scale * fluid.viscosity * scales.length * scales.length /
      (p_star * scales.time);
  return soil;
}

double gravity_number(const CharacteristicScales& scales, const FluidProperties& fluid) {
  return fluid.density * fluid.gravity * scales.length / std::abs(scales.pressure);
}

double realistic_bc_left(double y, double t, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("realistic_bc_left: epsilon must be positive");
  if (t <= 0.0) return -1.0;  // matches the initial condition
  if (y < (1.0 - epsilon) / t) return -1.0 + t * y;
  return -epsilon;
}

Problem realistic_case(const RealisticCaseParams& params) {
  const ScaledSoil s1 = nondimensionalize(params.soil1, params.scales, params.fluid);
  const ScaledSoil s2 = nondimensionalize(params.soil2, params.scales, params.fluid);
  const double n_g = gravity_number(params.scales, params.fluid);
  const double eps = params.epsilon;

  Problem p;
  p.models = {VanGenuchtenModel(s1.s_r, s1.s_s, s1.alpha, s1.n_hat, s1.mobility_scale, s1.porosity),
              VanGenuchtenModel(s2.s_r, s2.s_s, s2.alpha, s2.n_hat, s2.mobility_scale, s2.porosity)};
  p.gravity_potential = [n_g](double x, double) { return -n_g * x; };
  p.initial = [](Subdomain, double, double) { return -1.0; };

  p.bc.set(Subdomain::omega1, Side::west,
           {BcKind::dirichlet,
            [eps](double, double y, double t) { return realistic_bc_left(y, t, eps); }});
  p.bc.set(Subdomain::omega2, Side::east,
           {BcKind::dirichlet, [](double, double, double) { return -1.0; }});
  const SideCondition no_flow{BcKind::neumann, [](double, double, double) { return 0.0; }};
  p.bc.set(Subdomain::omega1, Side::south, no_flow);
  p.bc.set(Subdomain::omega1, Side::north, no_flow);
  p.bc.set(Subdomain::omega2, Side::south, no_flow);
  p.bc.set(Subdomain::omega2, Side::north, no_flow);
  return p;
}

}  // namespace lddflow
