#pragma once

#include <array>

#include "vpb/collision.hpp"

namespace vpb {

struct TransportCoefficients {
  double mu = 0.0;     // (1/15) sum_ij <A_ij, A^_ij>
  double kappa = 0.0;  // (2/15) sum_i <B_i, B^_i>
  /// Pairing constant of the stress closure, <A_12, A^_12> = (1/10) of the
  /// summed pairing; this is the coefficient that multiplies Sigma(u) in
  /// the limit momentum equation (= 3/2 mu).
  double mu_stress = 0.0;
  std::vector<VelocityFunction> A_hat;  // 6 components: 11,22,33,12,13,23
  std::vector<VelocityFunction> B_hat;  // 3 components
  double residual_A = 0.0;              // ||L A_hat - A|| / ||A|| (worst)
  double residual_B = 0.0;
};

/// A(v) = v tensor v - |v|^2/3 I and B(v) = (|v|^2/2 - 5/2) v.
std::pair<std::vector<VelocityFunction>, std::vector<VelocityFunction>>
build_AB(BasisPtr basis);

/// Unique solution of L x = rhs orthogonal to Ker L.
VelocityFunction solve_hat(const LinearizedOperator& op,
                           const VelocityFunction& rhs);

/// mu = (1/15) sum_ij <A_ij, A^_ij>, kappa = (2/15) sum_i <B_i, B^_i>.
TransportCoefficients compute_mu_kappa(const LinearizedOperator& op);

/// Independent Sonine-Galerkin reference for mu and kappa: Laguerre-type
/// radial expansion with bracket integrals evaluated by direct quadrature
/// of the collision Dirichlet form in center-of-mass variables.
struct SonineResult {
  double mu = 0.0;
  double kappa = 0.0;
  std::vector<double> mu_by_order;  // values at orders 1..K
  std::vector<double> kappa_by_order;
};
SonineResult sonine_transport_oracle(int orders = 6);

}  // namespace vpb
