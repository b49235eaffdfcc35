#include <doctest.h>

#include <cmath>
#include <random>

#include "lddflow/cases.hpp"

using namespace lddflow;

namespace {

// finite-difference residual of d_t S(p) + div(-k grad p) - f for the
// benchmark with exact solution (no gravity), independent of the assembly
double fd_pde_residual(Subdomain l, double x, double y, double t, double h) {
  const PowerLawModel model(l == Subdomain::omega1 ? 1 : 2);
  const auto p = [&](double xx, double yy, double tt) {
    return manufactured_exact(l, xx, yy, tt);
  };
  const auto mob = [&](double xx, double yy, double tt) {
    return model.rel_perm(p(xx, yy, tt));
  };
  const double dt_s =
      (model.saturation(p(x, y, t + h)) - model.saturation(p(x, y, t - h))) / (2.0 * h);
  const double div_x = (mob(x + 0.5 * h, y, t) * (p(x + h, y, t) - p(x, y, t)) -
                        mob(x - 0.5 * h, y, t) * (p(x, y, t) - p(x - h, y, t))) /
                       (h * h);
  const double div_y = (mob(x, y + 0.5 * h, t) * (p(x, y + h, t) - p(x, y, t)) -
                        mob(x, y - 0.5 * h, t) * (p(x, y, t) - p(x, y - h, t))) /
                       (h * h);
  return dt_s - div_x - div_y - manufactured_source(l, x, y, t);
}

}  // namespace

TEST_CASE("exact pressure values") {
  CHECK(manufactured_exact(Subdomain::omega1, 0.0, 0.0, 0.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(manufactured_exact(Subdomain::omega1, -1.0, 0.5, 0.0) ==
        doctest::Approx(-1.25).epsilon(1e-14));
  CHECK(manufactured_exact(Subdomain::omega2, 0.3, 0.0, 1.0) ==
        doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("exact pressure is continuous across the interface") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ydist(0.0, 1.0), tdist(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double y = ydist(rng), t = tdist(rng);
    CHECK(manufactured_exact(Subdomain::omega1, 0.0, y, t) ==
          doctest::Approx(manufactured_exact(Subdomain::omega2, 0.0, y, t)).epsilon(1e-14));
  }
}

TEST_CASE("source term values") {
  CHECK(manufactured_source(Subdomain::omega1, 0.0, 0.0, 0.0) ==
        doctest::Approx(4.0).epsilon(1e-14));
  CHECK(manufactured_source(Subdomain::omega2, 0.5, 1.0, 0.0) ==
        doctest::Approx(0.0).scale(1.0));
  CHECK(manufactured_source(Subdomain::omega2, 0.5, 0.0, 0.0) ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("source terms satisfy the PDE to second order") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> ydist(0.1, 0.9), tdist(0.1, 1.0);
  std::uniform_real_distribution<double> x1dist(-0.9, -0.1), x2dist(0.1, 0.9);
  for (int i = 0; i < 20; ++i) {
    const double y = ydist(rng), t = tdist(rng);
    for (double h : {1e-3, 5e-4}) {
      const double r1 = fd_pde_residual(Subdomain::omega1, x1dist(rng), y, t, h);
      const double r2 = fd_pde_residual(Subdomain::omega2, x2dist(rng), y, t, h);
      CHECK(std::abs(r1) <= 50.0 * h * h);
      CHECK(std::abs(r2) <= 50.0 * h * h);
    }
  }
}

TEST_CASE("boundary data is the exact trace") {
  CHECK(manufactured_bc(Subdomain::omega1, -1.0, 0.5, 0.0) ==
        doctest::Approx(-1.25).epsilon(1e-14));
  CHECK(manufactured_bc(Subdomain::omega2, 1.0, 0.0, 0.0) ==
        doctest::Approx(0.0).scale(1.0));
  // corner adjacent to the interface matches both subdomain formulas
  CHECK(manufactured_bc(Subdomain::omega1, 0.0, 1.0, 0.5) ==
        doctest::Approx(manufactured_bc(Subdomain::omega2, 0.0, 1.0, 0.5)).epsilon(1e-14));
}

TEST_CASE("realistic inflow boundary") {
  CHECK(realistic_bc_left(0.5, 1.0, 0.1) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(realistic_bc_left(0.95, 1.0, 0.1) == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(realistic_bc_left(0.3, 0.0, 0.1) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK_THROWS_AS(realistic_bc_left(0.5, 1.0, 0.0), std::invalid_argument);

  // continuity at the branch point y = (1 - eps)/t
  const double eps = 0.05, t = 2.0;
  const double y_star = (1.0 - eps) / t;
  CHECK(realistic_bc_left(y_star - 1e-12, t, eps) == doctest::Approx(-eps).epsilon(1e-9));
  CHECK(realistic_bc_left(y_star, t, eps) == doctest::Approx(-eps).epsilon(1e-14));
}

TEST_CASE("nondimensionalization with unit scales keeps SI parameters") {
  VanGenuchtenSoil soil{0.1, 0.4, 3.0, 2.5, 2e-13};
  CharacteristicScales unit{1.0, 1.0, 1.0};
  FluidProperties fluid;
  fluid.viscosity = 1.0;
  const ScaledSoil scaled = nondimensionalize(soil, unit, fluid);
  CHECK(scaled.alpha == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(scaled.mobility_scale == doctest::Approx(2e-13).epsilon(1e-15));
  CHECK(scaled.porosity == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(scaled.s_r == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("mobility scale and gravity number hand values") {
  VanGenuchtenSoil soil{0.1, 0.4, 3e-5, 2.5, 2e-13};
  CharacteristicScales scales{-14.8e3, 1.48, 41440.0};
  const ScaledSoil scaled = nondimensionalize(soil, scales);
  // kappa |p*| t* / (mu x*^2) = 2e-13 * 14800 * 41440 / (1e-3 * 1.48^2)
  CHECK(scaled.mobility_scale == doctest::Approx(0.056).epsilon(1e-12));
  CHECK(gravity_number(scales) == doctest::Approx(0.981).epsilon(1e-12));
}

TEST_CASE("nondimensionalize round-trips on random parameter sets") {
  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int i = 0; i < 100; ++i) {
    VanGenuchtenSoil soil{0.05 * u(rng), 0.3 + 0.1 * u(rng), 1e-4 * u(rng), 1.0 + u(rng),
                          1e-13 * u(rng)};
    CharacteristicScales scales{-1e4 * u(rng), u(rng), 1e4 * u(rng)};
    FluidProperties fluid;
    const VanGenuchtenSoil back =
        redimensionalize(nondimensionalize(soil, scales, fluid), scales, fluid);
    CHECK(back.theta_r == doctest::Approx(soil.theta_r).epsilon(1e-12));
    CHECK(back.theta_s == doctest::Approx(soil.theta_s).epsilon(1e-12));
    CHECK(back.alpha == doctest::Approx(soil.alpha).epsilon(1e-12));
    CHECK(back.n_hat == doctest::Approx(soil.n_hat).epsilon(1e-12));
    CHECK(back.permeability == doctest::Approx(soil.permeability).epsilon(1e-12));
  }
  CHECK_THROWS_AS(nondimensionalize(VanGenuchtenSoil{0.1, 0.4, 1.0, 2.0, 1e-13},
                                    CharacteristicScales{0.0, 1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("realistic case construction") {
  const RealisticCaseParams params;
  const Problem p = realistic_case(params);
  // gravity potential falls along +x with the gravity number as slope
  const double n_g = gravity_number(params.scales, params.fluid);
  CHECK(p.zeta(1.0, 0.3) == doctest::Approx(-n_g).epsilon(1e-13));
  CHECK(p.zeta(0.0, 0.7) == doctest::Approx(0.0).scale(1.0));
  CHECK(p.initial(Subdomain::omega1, -0.5, 0.5) == -1.0);
  CHECK(p.has_exact() == false);
  CHECK_NOTHROW(p.bc.validate());
  // the two materials keep very different scaled conductivities
  const double m1 = mobility(p.model(Subdomain::omega1), 0.0);
  const double m2 = mobility(p.model(Subdomain::omega2), 0.0);
  CHECK(m2 / m1 > 5.0);
}
