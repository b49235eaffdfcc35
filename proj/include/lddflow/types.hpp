#ifndef LDDFLOW_TYPES_HPP
#define LDDFLOW_TYPES_HPP

#include <Eigen/Core>

namespace lddflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Subdomain label. The domain is split by a vertical interface into a left
/// part (Omega1) and a right part (Omega2).
enum class Subdomain : int { omega1 = 0, omega2 = 1 };

inline constexpr Subdomain other(Subdomain l) {
  return l == Subdomain::omega1 ? Subdomain::omega2 : Subdomain::omega1;
}

inline constexpr int side_index(Subdomain l) { return static_cast<int>(l); }

inline constexpr Subdomain subdomain_of(int index) {
  return index == 0 ? Subdomain::omega1 : Subdomain::omega2;
}

}  // namespace lddflow

#endif
