#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "vpb/quadrature.hpp"

namespace vpb {

/// Evaluate the orthonormal probabilists' Hermite polynomials
/// h_k(x) = He_k(x)/sqrt(k!), k = 0..n-1, at a point.
void hermite_eval(int n, double x, double* out);

/// Tensor-product Hermite modal basis attached to a velocity quadrature.
///
/// Modal functions are phi_m(v) = h_{m0}(v0) h_{m1}(v1) h_{m2}(v2) with
/// per-axis degree <= nodes_per_axis - 1; they are orthonormal in
/// L^2(M dv) and the nodal<->modal maps are exact inverses (collocation
/// at the quadrature nodes). Flat modal index matches the node layout:
/// (m0 * n + m1) * n + m2.
class HermiteBasis {
 public:
  explicit HermiteBasis(QuadraturePtr quad);

  int max_degree() const { return n_ - 1; }  // per axis
  int size() const { return n_ * n_ * n_; }
  int axis_size() const { return n_; }
  const VelocityQuadrature& quad() const { return *quad_; }
  QuadraturePtr quad_ptr() const { return quad_; }

  /// 1D evaluation matrix E1(i,k) = h_k(x_i) and its inverse.
  const Eigen::MatrixXd& eval1d() const { return E1_; }
  const Eigen::MatrixXd& proj1d() const { return B1_; }

  Eigen::VectorXd to_modal(const Eigen::VectorXd& nodal) const;
  Eigen::VectorXd to_nodal(const Eigen::VectorXd& modal) const;

  /// Exact spectral derivative d/dv_axis in modal coefficients
  /// (degree-lowering ladder).
  Eigen::VectorXd d_dv(const Eigen::VectorXd& modal, int axis) const;

  /// Multiplication by v_axis in modal coefficients, truncated to the
  /// basis (identical to nodal multiplication by v_axis).
  Eigen::VectorXd v_mult(const Eigen::VectorXd& modal, int axis) const;

  /// All size() basis values at an arbitrary velocity.
  Eigen::VectorXd eval_point(const std::array<double, 3>& v) const;

  /// Flat modal indices of the total-degree-D subspace, ascending.
  std::vector<int> total_degree_indices(int D) const;

  int flat(int m0, int m1, int m2) const { return (m0 * n_ + m1) * n_ + m2; }
  std::array<int, 3> unflat(int m) const {
    return {m / (n_ * n_), (m / n_) % n_, m % n_};
  }

 private:
  QuadraturePtr quad_;
  int n_;
  Eigen::MatrixXd E1_, B1_;
};

using BasisPtr = std::shared_ptr<const HermiteBasis>;

BasisPtr build_basis(QuadraturePtr quad);

}  // namespace vpb
