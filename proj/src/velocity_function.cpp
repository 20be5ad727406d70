#include "vpb/velocity_function.hpp"

namespace vpb {

VelocityFunction::VelocityFunction(BasisPtr basis, Eigen::VectorXd nodal)
    : basis_(std::move(basis)), nodal_(std::move(nodal)) {
  require(nodal_.size() == basis_->size(),
          "VelocityFunction: nodal size does not match quadrature");
}

VelocityFunction VelocityFunction::from_modal(BasisPtr basis,
                                              Eigen::VectorXd modal) {
  VelocityFunction f(basis, basis->to_nodal(modal));
  f.modal_ = std::move(modal);
  return f;
}

const Eigen::VectorXd& VelocityFunction::modal() const {
  if (!modal_) modal_ = basis_->to_modal(nodal_);
  return *modal_;
}

bool VelocityFunction::compatible(const VelocityFunction& other) const {
  return basis_ && other.basis_ && basis_->quad().compatible(other.basis_->quad());
}

double inner_product(const VelocityFunction& f, const VelocityFunction& g,
                     Weight w, const VelocityFunction* nu) {
  require(f.compatible(g), "inner_product: functions on different quadratures");
  const auto& wts = f.basis().quad().weights();
  double s = 0.0;
  if (w == Weight::unit) {
    for (int k = 0; k < f.size(); ++k) s += wts[k] * f.nodal()[k] * g.nodal()[k];
  } else {
    require(nu != nullptr && nu->compatible(f),
            "inner_product: nu weight requires nu on the same quadrature");
    for (int k = 0; k < f.size(); ++k)
      s += wts[k] * nu->nodal()[k] * f.nodal()[k] * g.nodal()[k];
  }
  return s;
}

VelocityFunction v_derivative(const VelocityFunction& f,
                              const std::array<int, 3>& beta) {
  const auto& basis = f.basis();
  require(beta[0] >= 0 && beta[1] >= 0 && beta[2] >= 0,
          "v_derivative: multi-index must be nonnegative");
  require(beta[0] + beta[1] + beta[2] <= basis.max_degree(),
          "v_derivative: |beta| exceeds basis degree");
  Eigen::VectorXd m = f.modal();
  for (int axis = 0; axis < 3; ++axis)
    for (int r = 0; r < beta[axis]; ++r) m = basis.d_dv(m, axis);
  return VelocityFunction::from_modal(f.basis_ptr(), std::move(m));
}

}  // namespace vpb
