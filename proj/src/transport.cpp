#include "vpb/transport.hpp"

namespace vpb {
namespace {

constexpr int kPairsI[6] = {0, 1, 2, 0, 0, 1};
constexpr int kPairsJ[6] = {0, 1, 2, 1, 2, 2};

}  // namespace

std::pair<std::vector<VelocityFunction>, std::vector<VelocityFunction>>
build_AB(BasisPtr basis) {
  const auto& quad = basis->quad();
  std::vector<VelocityFunction> A, B;
  for (int c = 0; c < 6; ++c) {
    int i = kPairsI[c], j = kPairsJ[c];
    Eigen::VectorXd vals(quad.size());
    for (int k = 0; k < quad.size(); ++k) {
      const auto& v = quad.node(k);
      double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      vals[k] = v[i] * v[j] - (i == j ? v2 / 3.0 : 0.0);
    }
    A.emplace_back(basis, std::move(vals));
  }
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd vals(quad.size());
    for (int k = 0; k < quad.size(); ++k) {
      const auto& v = quad.node(k);
      double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      vals[k] = (0.5 * v2 - 2.5) * v[i];
    }
    B.emplace_back(basis, std::move(vals));
  }
  return {std::move(A), std::move(B)};
}

VelocityFunction solve_hat(const LinearizedOperator& op,
                           const VelocityFunction& rhs) {
  Eigen::VectorXd x = op.solve_on_complement(rhs.modal());
  return VelocityFunction::from_modal(op.basis_ptr(), std::move(x));
}

TransportCoefficients compute_mu_kappa(const LinearizedOperator& op) {
  auto [A, B] = build_AB(op.basis_ptr());
  TransportCoefficients out;
  double mu_sum = 0.0;
  for (int c = 0; c < 6; ++c) {
    VelocityFunction hat = solve_hat(op, A[c]);
    double resid =
        std::sqrt((op.apply_modal(hat.modal()) - A[c].modal()).squaredNorm() /
                  A[c].modal().squaredNorm());
    out.residual_A = std::max(out.residual_A, resid);
    double pair = inner_product(A[c], hat);
    mu_sum += (c < 3 ? 1.0 : 2.0) * pair;  // off-diagonal pairs count twice
    out.A_hat.push_back(std::move(hat));
  }
  out.mu = mu_sum / 15.0;
  out.mu_stress = mu_sum / 10.0;
  double kappa_sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    VelocityFunction hat = solve_hat(op, B[i]);
    double resid =
        std::sqrt((op.apply_modal(hat.modal()) - B[i].modal()).squaredNorm() /
                  B[i].modal().squaredNorm());
    out.residual_B = std::max(out.residual_B, resid);
    kappa_sum += inner_product(B[i], hat);
    out.B_hat.push_back(std::move(hat));
  }
  out.kappa = 2.0 * kappa_sum / 15.0;
  require_numeric(out.mu > 0.0 && out.kappa > 0.0,
                  "compute_mu_kappa: nonpositive transport coefficient");
  return out;
}

}  // namespace vpb
