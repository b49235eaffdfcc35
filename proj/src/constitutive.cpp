#include "lddflow/constitutive.hpp"

#include <cmath>
#include <stdexcept>

namespace lddflow {

PowerLawModel::PowerLawModel(int subdomain_index_) : subdomain_index(subdomain_index_) {
  if (subdomain_index != 1 && subdomain_index != 2)
    throw std::invalid_argument("PowerLawModel: subdomain index must be 1 or 2");
}

double PowerLawModel::saturation(double p) const {
  if (p >= 0.0) return 1.0;
  return std::pow(1.0 - p, -1.0 / (subdomain_index + 1));
}

double PowerLawModel::saturation_derivative(double p) const {
  if (p > 0.0) return 0.0;
  // left limit at the kink p = 0
  const double e = 1.0 / (subdomain_index + 1);
  return e * std::pow(1.0 - p, -e - 1.0);
}

double PowerLawModel::rel_perm(double p) const {
  const double s = saturation(p);
  return subdomain_index == 1 ? s * s : s * s * s;
}

double PowerLawModel::mobility_derivative(double p) const {
  if (p > 0.0) return 0.0;
  const double s = saturation(p);
  const double dk_ds = subdomain_index == 1 ? 2.0 * s : 3.0 * s * s;
  return dk_ds * saturation_derivative(p);
}

VanGenuchtenModel::VanGenuchtenModel(double s_r_, double s_s_, double alpha_,
                                     double n_hat_, double mobility_scale_,
                                     double porosity_scale_)
    : s_r(s_r_),
      s_s(s_s_),
      alpha(alpha_),
      n_hat(n_hat_),
      m(1.0 - 1.0 / n_hat_),
      mobility_scale(mobility_scale_),
      porosity_scale(porosity_scale_) {
  if (!(0.0 <= s_r && s_r < s_s && s_s <= 1.0))
    throw std::invalid_argument("VanGenuchtenModel: need 0 <= s_r < s_s <= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("VanGenuchtenModel: alpha must be positive");
  if (!(n_hat > 1.0)) throw std::invalid_argument("VanGenuchtenModel: n_hat must exceed 1");
  if (!(mobility_scale > 0.0) || !(porosity_scale > 0.0))
    throw std::invalid_argument("VanGenuchtenModel: scales must be positive");
}

double VanGenuchtenModel::effective_saturation(double p) const {
  if (p >= 0.0) return 1.0;
  return std::pow(1.0 + std::pow(-alpha * p, n_hat), -m);
}

double VanGenuchtenModel::saturation(double p) const {
  return s_r + (s_s - s_r) * effective_saturation(p);
}

double VanGenuchtenModel::saturation_derivative(double p) const {
  if (p >= 0.0) return 0.0;  // left limit is also 0 for n_hat > 1
  const double a = -alpha * p;
  const double an = std::pow(a, n_hat);
  const double dphi = m * n_hat * alpha * std::pow(a, n_hat - 1.0) * std::pow(1.0 + an, -m - 1.0);
  return (s_s - s_r) * dphi;
}

double VanGenuchtenModel::rel_perm(double p) const {
  const double phi = effective_saturation(p);
  if (phi >= 1.0) return 1.0;
  const double w = std::pow(1.0 - std::pow(phi, 1.0 / m), m);
  const double r = std::sqrt(phi) * (1.0 - w) * (1.0 - w);
  return r;
}

double VanGenuchtenModel::mobility_derivative(double p) const {
  if (p >= 0.0) return 0.0;
  const double phi = effective_saturation(p);
  const double u = std::pow(phi, 1.0 / m);
  const double w = std::pow(1.0 - u, m);
  const double dw_dphi = -std::pow(1.0 - u, m - 1.0) * std::pow(phi, 1.0 / m - 1.0);
  const double dk_dphi =
      0.5 / std::sqrt(phi) * (1.0 - w) * (1.0 - w) - 2.0 * std::sqrt(phi) * (1.0 - w) * dw_dphi;
  const double a = -alpha * p;
  const double an = std::pow(a, n_hat);
  const double dphi_dp = m * n_hat * alpha * std::pow(a, n_hat - 1.0) * std::pow(1.0 + an, -m - 1.0);
  return mobility_scale * dk_dphi * dphi_dp;
}

namespace {

template <typename F>
double visit_model(const ConstitutiveModel& model, F&& f) {
  return std::visit([&](const auto& m) { return f(m); }, model);
}

}  // namespace

double saturation(const ConstitutiveModel& model, double p) {
  return visit_model(model, [p](const auto& m) { return m.saturation(p); });
}

double saturation_derivative(const ConstitutiveModel& model, double p) {
  return visit_model(model, [p](const auto& m) { return m.saturation_derivative(p); });
}

double rel_perm(const ConstitutiveModel& model, double p) {
  return visit_model(model, [p](const auto& m) { return m.rel_perm(p); });
}

double mobility(const ConstitutiveModel& model, double p) {
  return visit_model(model, [p](const auto& m) { return m.mobility(p); });
}

double mobility_derivative(const ConstitutiveModel& model, double p) {
  return visit_model(model, [p](const auto& m) { return m.mobility_derivative(p); });
}

double accumulation(const ConstitutiveModel& model, double p) {
  return visit_model(model, [p](const auto& m) { return m.accumulation(p); });
}

double accumulation_derivative(const ConstitutiveModel& model, double p) {
  return visit_model(model, [p](const auto& m) { return m.accumulation_derivative(p); });
}

MaterialBounds::MaterialBounds(double l_s, double l_k, double m_lower, double m_grad)
    : lipschitz_saturation(l_s),
      lipschitz_rel_perm(l_k),
      mobility_lower(m_lower),
      gradient_bound(m_grad) {
  if (!(l_s > 0.0 && l_k > 0.0 && m_lower > 0.0 && m_grad > 0.0))
    throw std::invalid_argument("MaterialBounds: all bounds must be strictly positive");
}

double tau_max(const MaterialBounds& bounds, double stabilization) {
  const double l_s = bounds.lipschitz_saturation;
  if (!(stabilization > 0.5 * l_s))
    throw std::invalid_argument("tau_max: stabilization constant must exceed L_S / 2");
  const double l_k = bounds.lipschitz_rel_perm;
  const double m = bounds.mobility_lower;
  const double grad = bounds.gradient_bound;
  return 2.0 * m / (l_k * l_k * grad * grad) * (1.0 / l_s - 0.5 / stabilization);
}

AssumptionReport verify_assumptions(const ConstitutiveModel& model, double p_min,
                                    double p_max, int n_samples) {
  if (!(p_min < p_max)) throw std::invalid_argument("verify_assumptions: empty pressure range");
  if (n_samples < 2) throw std::invalid_argument("verify_assumptions: need at least 2 samples");

  const double h = (p_max - p_min) / (n_samples - 1);
  AssumptionReport report;
  report.saturation_monotone = true;
  report.rel_perm_monotone = true;

  double prev_p = p_min;
  double prev_s = saturation(model, p_min);
  double prev_k = rel_perm(model, p_min);
  double mob_min = mobility(model, p_min);

  for (int i = 1; i < n_samples; ++i) {
    const double p = p_min + i * h;
    const double s = saturation(model, p);
    const double k = rel_perm(model, p);
    if (s < prev_s - 1e-13) report.saturation_monotone = false;
    if (k < prev_k - 1e-13) report.rel_perm_monotone = false;
    report.lipschitz_saturation =
        std::max(report.lipschitz_saturation, std::abs(s - prev_s) / (p - prev_p));
    if (std::abs(s - prev_s) > 1e-300)
      report.lipschitz_rel_perm =
          std::max(report.lipschitz_rel_perm, std::abs(k - prev_k) / std::abs(s - prev_s));
    mob_min = std::min(mob_min, mobility(model, p));
    prev_p = p;
    prev_s = s;
    prev_k = k;
  }
  report.mobility_lower_bound = mob_min;
  report.mobility_positive = mob_min > 0.0;
  return report;
}

}  // namespace lddflow
