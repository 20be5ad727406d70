#pragma once

#include <Eigen/Dense>
#include <array>

#include "vpb/velocity_function.hpp"

namespace vpb {

/// Hydrodynamic coefficients at one spatial point: P g = a + b.v + c|v|^2.
struct MacroPoint {
  double a = 0.0;
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double c = 0.0;

  // moment convention converters (rho = <g,1>, u = <g,v>,
  // theta = <g,|v|^2/3 - 1>)
  double rho() const { return a + 3.0 * c; }
  Eigen::Vector3d u() const { return b; }
  double theta() const { return 2.0 * c; }
  static MacroPoint from_rho_u_theta(double rho, const Eigen::Vector3d& u,
                                     double theta) {
    MacroPoint m;
    m.c = 0.5 * theta;
    m.a = rho - 1.5 * theta;
    m.b = u;
    return m;
  }
};

/// Moment extraction and reconstruction of the hydrodynamic projection.
MacroPoint extract_macro(const VelocityFunction& g);
VelocityFunction reconstruct_P(const MacroPoint& m, BasisPtr basis);

/// P g and g - P g in one pass.
std::pair<MacroPoint, VelocityFunction> project_P(const VelocityFunction& g);

/// Modal-coefficient versions used on hot paths.
MacroPoint extract_macro_modal(const Eigen::VectorXd& modal,
                               const HermiteBasis& basis);

/// The thirteen moments {1, v_i, v_i^2, v_i |v|^2, v_i v_j (i<j)} and the
/// bi-orthogonal dual family, each dual a combination of the primals.
class ThirteenMomentBasis {
 public:
  explicit ThirteenMomentBasis(BasisPtr basis);

  const VelocityFunction& e(int k) const { return primal_[k]; }
  const VelocityFunction& e_dual(int k) const { return dual_[k]; }
  const Eigen::MatrixXd& gram() const { return gram_; }

  /// <term, e*_k> for k = 0..12.
  Eigen::VectorXd extract_source_coefficients(const VelocityFunction& term) const;

  /// Combinations entering the interactive energy functional:
  /// zeta_i from the v_i|v|^2 rows, zeta_ij from the v_i^2 / v_i v_j rows.
  const VelocityFunction& zeta(int i) const { return zeta_i_[i]; }
  const VelocityFunction& zeta(int i, int j) const { return zeta_ij_[i][j]; }

  // index helpers into the primal ordering
  static int idx_one() { return 0; }
  static int idx_v(int i) { return 1 + i; }
  static int idx_v2(int i) { return 4 + i; }
  static int idx_vv2(int i) { return 7 + i; }
  static int idx_vij(int i, int j);  // i < j

 private:
  BasisPtr basis_;
  std::vector<VelocityFunction> primal_, dual_;
  Eigen::MatrixXd gram_;
  std::array<VelocityFunction, 3> zeta_i_;
  std::array<std::array<VelocityFunction, 3>, 3> zeta_ij_;
};

/// Moment tensors <g, v tensor v> and <g, |v|^2 v> of a micro function.
std::pair<Eigen::Matrix3d, Eigen::Vector3d> micro_flux(
    const VelocityFunction& g_micro);

}  // namespace vpb
