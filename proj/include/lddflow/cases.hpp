#ifndef LDDFLOW_CASES_HPP
#define LDDFLOW_CASES_HPP

#include "lddflow/problem.hpp"

namespace lddflow {

// ---------------------------------------------------------------------------
// Benchmark with exact solution (no gravity, power-law materials)
// ---------------------------------------------------------------------------

/// p_1 = 1 - (1+t^2)(1+x^2+y^2) on Omega1, p_2 = 1 - (1+t^2)(1+y^2) on
/// Omega2. The two expressions agree on the interface x = 0 and the flux of
/// the exact solution across it is zero.
double manufactured_exact(Subdomain l, double x, double y, double t);

/// Source terms that make the exact pressures solve the flow equation.
double manufactured_source(Subdomain l, double x, double y, double t);

/// Dirichlet data: the trace of the exact solution.
double manufactured_bc(Subdomain l, double x, double y, double t);

Problem manufactured_case();

/// Omega1 = (-1,0) x (0,1), Omega2 = (0,1) x (0,1) with square cells.
GridSpec benchmark_grid(double dx);

// ---------------------------------------------------------------------------
// Realistic case: van Genuchten materials, gravity along +x
// ---------------------------------------------------------------------------

/// Dimensional material data in SI units (alpha per Pa, permeability in m^2).
struct VanGenuchtenSoil {
  double theta_r;       // residual volumetric water content
  double theta_s;       // saturated volumetric water content (= porosity)
  double alpha;         // 1/Pa
  double n_hat;         // > 1
  double permeability;  // m^2
};

struct FluidProperties {
  double density = 1000.0;   // kg/m^3
  double viscosity = 1e-3;   // Pa s
  double gravity = 9.81;     // m/s^2
};

/// Conversion from the head-based units common in soil databases
/// (alpha in 1/m of pressure head, conductivity in m/day).
VanGenuchtenSoil soil_from_head_units(double theta_r, double theta_s, double alpha_per_meter,
                                      double n_hat, double conductivity_m_per_day,
                                      const FluidProperties& fluid = {});

/// Literature values for the two materials (van Genuchten's curve fits);
/// not tied to any particular study setup and overridable via config.
VanGenuchtenSoil silt_loam_ge3(const FluidProperties& fluid = {});
VanGenuchtenSoil hygiene_sandstone(const FluidProperties& fluid = {});

struct CharacteristicScales {
  double pressure = -14.8e3;  // Pa; the magnitude scales pressures
  double length = 1.48;       // m
  double time = 41440.0;      // s
};

/// Dimensionless material parameters: scaled alpha = alpha |p*|, mobility
/// scale = kappa |p*| t* / (mu x*^2); the porosity stays in the accumulation.
struct ScaledSoil {
  double s_r;
  double s_s;
  double alpha;
  double n_hat;
  double mobility_scale;
  double porosity;
};

ScaledSoil nondimensionalize(const VanGenuchtenSoil& soil, const CharacteristicScales& scales,
                             const FluidProperties& fluid = {});
VanGenuchtenSoil redimensionalize(const ScaledSoil& scaled, const CharacteristicScales& scales,
                                  const FluidProperties& fluid = {});

/// rho g x* / |p*|; the scaled total potential is psi = p - N_g x.
double gravity_number(const CharacteristicScales& scales, const FluidProperties& fluid = {});

struct RealisticCaseParams {
  VanGenuchtenSoil soil1 = silt_loam_ge3();   // Omega1
  VanGenuchtenSoil soil2 = hygiene_sandstone();  // Omega2
  CharacteristicScales scales;
  FluidProperties fluid;
  double epsilon = 1e-2;  // keeps the wet boundary away from full saturation
};

/// Dirichlet value at the inflow boundary x = -1:
/// -1 + t y while y < (1-eps)/t, capped at -eps; uniformly -1 at t = 0.
double realistic_bc_left(double y, double t, double epsilon);

Problem realistic_case(const RealisticCaseParams& params = {});

}  // namespace lddflow

#endif
