#ifndef LDDFLOW_CONSTITUTIVE_HPP
#define LDDFLOW_CONSTITUTIVE_HPP

#include <variant>

#include "lddflow/types.hpp"

namespace lddflow {

/// Power-law saturation/permeability pair used by the analytic benchmark.
///
/// S(p) = (1 - p)^(-1/(l+1)) for p < 0 and S = 1 for p >= 0, with
/// k_1(S) = S^2 on the first subdomain and k_2(S) = S^3 on the second.
struct PowerLawModel {
  int subdomain_index = 1;  // 1 or 2, selects the exponent pair

  explicit PowerLawModel(int subdomain_index_);

  double saturation(double p) const;
  double saturation_derivative(double p) const;
  double rel_perm(double p) const;
  double mobility(double p) const { return rel_perm(p); }
  double mobility_derivative(double p) const;
  double accumulation(double p) const { return saturation(p); }
  double accumulation_derivative(double p) const { return saturation_derivative(p); }
};

/// Van Genuchten-Mualem saturation and relative permeability.
///
/// Phi(p) = (1 + (-alpha p)^n_hat)^(-m) with m = 1 - 1/n_hat for p < 0 and
/// Phi = 1 at or above zero pressure. Saturation interpolates between s_r and
/// s_s, and k(S) = sqrt(Phi) (1 - (1 - Phi^(1/m))^m)^2.
///
/// `mobility_scale` multiplies the relative permeability (kappa/mu folded in
/// after nondimensionalisation) and `porosity_scale` multiplies saturation in
/// the accumulation term, so the assembly code is identical for scaled and
/// unit problems.
struct VanGenuchtenModel {
  double s_r = 0.0;
  double s_s = 1.0;
  double alpha = 1.0;
  double n_hat = 2.0;
  double m = 0.5;  // always 1 - 1/n_hat
  double mobility_scale = 1.0;
  double porosity_scale = 1.0;

  VanGenuchtenModel(double s_r_, double s_s_, double alpha_, double n_hat_,
                    double mobility_scale_ = 1.0, double porosity_scale_ = 1.0);

  double effective_saturation(double p) const;
  double saturation(double p) const;
  double saturation_derivative(double p) const;
  double rel_perm(double p) const;
  double mobility(double p) const { return mobility_scale * rel_perm(p); }
  double mobility_derivative(double p) const;
  double accumulation(double p) const { return porosity_scale * saturation(p); }
  double accumulation_derivative(double p) const {
    return porosity_scale * saturation_derivative(p);
  }
};

/// Linear diagnostic model: S(p) = slope * p with constant mobility.
/// Makes the L-scheme and Picard linearisations exact, which pins down
/// scheme behaviour in tests (one-iteration convergence, LFV == Picard).
struct LinearModel {
  double slope = 1.0;
  double mobility_value = 1.0;

  double saturation(double p) const { return slope * p; }
  double saturation_derivative(double) const { return slope; }
  double rel_perm(double) const { return mobility_value; }
  double mobility(double) const { return mobility_value; }
  double mobility_derivative(double) const { return 0.0; }
  double accumulation(double p) const { return slope * p; }
  double accumulation_derivative(double) const { return slope; }
};

using ConstitutiveModel = std::variant<PowerLawModel, VanGenuchtenModel, LinearModel>;

double saturation(const ConstitutiveModel& model, double p);
double saturation_derivative(const ConstitutiveModel& model, double p);
double rel_perm(const ConstitutiveModel& model, double p);
double mobility(const ConstitutiveModel& model, double p);
double mobility_derivative(const ConstitutiveModel& model, double p);
double accumulation(const ConstitutiveModel& model, double p);
double accumulation_derivative(const ConstitutiveModel& model, double p);

/// Lipschitz/bound data entering the sufficient time-step restriction.
struct MaterialBounds {
  double lipschitz_saturation;  // L_S
  double lipschitz_rel_perm;    // L_k, Lipschitz constant of k as a function of S
  double mobility_lower;        // m, essential lower bound of the mobility
  double gradient_bound;        // M, essential bound on |grad(p + z)|

  MaterialBounds(double l_s, double l_k, double m_lower, double m_grad);
};

/// Largest time step for which the domain-decomposition iteration is
/// guaranteed to contract: tau_max = 2 m / (L_k^2 M^2) (1/L_S - 1/(2L)).
/// Requires L > L_S / 2. The bound is sufficient, not necessary.
double tau_max(const MaterialBounds& bounds, double stabilization);

struct AssumptionReport {
  bool saturation_monotone = false;
  bool rel_perm_monotone = false;
  double lipschitz_saturation = 0.0;  // sampled sup |dS/dp|
  double lipschitz_rel_perm = 0.0;    // sampled sup |dk/dS|
  double mobility_lower_bound = 0.0;  // sampled min of the mobility
  bool mobility_positive = false;
};

/// Sampled check of monotonicity, Lipschitz constants and the mobility
/// floor over [p_min, p_max]. Estimates are lower bounds of the true
/// constants (finite sampling).
AssumptionReport verify_assumptions(const ConstitutiveModel& model, double p_min,
                                    double p_max, int n_samples);

}  // namespace lddflow

#endif
