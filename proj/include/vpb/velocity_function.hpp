#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "vpb/hermite.hpp"

namespace vpb {

enum class Weight { unit, nu };

/// A scalar function of velocity held as nodal values on a quadrature,
/// with a lazily computed modal (Hermite) view.
class VelocityFunction {
 public:
  VelocityFunction() = default;
  VelocityFunction(BasisPtr basis, Eigen::VectorXd nodal);

  static VelocityFunction from_modal(BasisPtr basis, Eigen::VectorXd modal);

  const Eigen::VectorXd& nodal() const { return nodal_; }
  const Eigen::VectorXd& modal() const;
  const HermiteBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }
  int size() const { return static_cast<int>(nodal_.size()); }

  bool compatible(const VelocityFunction& other) const;

 private:
  BasisPtr basis_;
  Eigen::VectorXd nodal_;
  mutable std::optional<Eigen::VectorXd> modal_;
};

/// Collision frequency nu(v) for hard spheres evaluated at the quadrature
/// nodes by the 1D radial reduction of its defining integral.
VelocityFunction collision_frequency(BasisPtr basis);

/// nu as a function of speed (semi-analytic, adaptive radial quadrature).
double collision_frequency_radial(double speed);

/// Quadrature inner product <f, g> or <f, g>_nu. Both functions must live
/// on the same quadrature; for Weight::nu pass nu precomputed on the same
/// nodes.
double inner_product(const VelocityFunction& f, const VelocityFunction& g,
                     Weight w = Weight::unit,
                     const VelocityFunction* nu = nullptr);

/// Exact spectral derivative d^beta/dv^beta through the modal ladder.
VelocityFunction v_derivative(const VelocityFunction& f,
                              const std::array<int, 3>& beta);

}  // namespace vpb
