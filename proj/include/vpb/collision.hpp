#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "vpb/velocity_function.hpp"

namespace vpb {

/// Quadrature rule on the unit sphere: product split-Gauss-Legendre in
/// the polar cosine and trapezoid in azimuth, relative to a given frame.
/// Weights sum to 4*pi.
struct AngularRule {
  std::vector<std::array<double, 3>> directions;
  std::vector<double> weights;
  int order = 0;  // exact for spherical polynomials of this degree

  /// Rule in the standard frame (e1, e2, e3).
  static AngularRule product(int order);
  /// Rule whose polar axis is the unit vector `axis` (deterministic frame).
  static AngularRule adapted(int n_theta_half, int n_psi,
                             const std::array<double, 3>& axis);
};

struct CollisionConfig {
  int degree = 9;       // total-degree Galerkin space of the operator
  int nl_degree = 6;    // space carrying the quadratic tensors
  int pair_nodes = 5;   // per-axis nodes of the tensor pair quadrature
  int theta_half = 6;   // deflection rule size for the tensor assembly
  int psi = 7;
  double tol_null = 1e-6;
  std::string cache_dir;  // empty: no disk cache
};

/// Hard-sphere linearized collision operator L = nu + K assembled as the
/// exact Galerkin form of its Dirichlet integral on the total-degree
/// Hermite space, closed with a diagonal nu-relaxation on the remaining
/// collocation modes, plus the quadratic collision tensors used by Q.
class LinearizedOperator {
 public:
  LinearizedOperator(BasisPtr basis, const CollisionConfig& cfg);

  const HermiteBasis& basis() const { return *basis_; }
  BasisPtr basis_ptr() const { return basis_; }
  const CollisionConfig& config() const { return cfg_; }

  const VelocityFunction& nu() const { return nu_; }
  double spectral_gap() const { return spectral_gap_; }
  double norm() const { return op_norm_; }
  double tol_null() const { return cfg_.tol_null; }

  /// Five orthonormal nodal vectors spanning Ker L (from the analytic
  /// invariants 1, v, |v|^2, Gram-Schmidt orthonormalized).
  const std::vector<VelocityFunction>& null_basis() const { return null_basis_; }

  /// Number of eigenvalues below tol_null * ||L||.
  int near_null_count() const;

  /// Action in full-tensor modal coefficients.
  Eigen::VectorXd apply_modal(const Eigen::VectorXd& modal) const;
  /// (I + c L)^{-1} in modal coefficients (shared spectral factorization).
  Eigen::VectorXd solve_implicit_modal(const Eigen::VectorXd& modal,
                                       double c) const;
  VelocityFunction apply(const VelocityFunction& f) const;

  /// Hydrodynamic projection P in modal coefficients.
  Eigen::VectorXd project_N_modal(const Eigen::VectorXd& modal) const;

  /// Dense nodal matrix (L f)_nodal = A f_nodal, materialized on demand.
  const Eigen::MatrixXd& matrix() const;

  /// Operator cache: header + row-major float64 matrix, byte-exact.
  void write_cache(const std::string& path) const;
  static Eigen::MatrixXd read_cache(const std::string& path, int nodes_per_axis,
                                    double scaling, int angular_order);

  // --- Galerkin internals shared with transport/diagnostics ---
  const std::vector<int>& dspace() const { return dspace_; }       // flat modal
  const Eigen::MatrixXd& form() const { return form_; }            // N_D x N_D
  const Eigen::VectorXd& tail_rates() const { return tail_rates_; }
  const std::vector<int>& tailspace() const { return tailspace_; }
  /// Positive eigenpairs of the form restricted to the complement of N.
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXd& eigenvectors() const { return evecs_; }  // N_D x (N_D-5)
  /// Exact modal coefficient vectors of the orthonormalized invariants.
  const Eigen::MatrixXd& invariant_coeffs() const { return inv_coeffs_; }

  /// Solve L x = rhs on the orthogonal complement of N (rhs must be in
  /// the Galerkin space; components on N are rejected beyond tol).
  Eigen::VectorXd solve_on_complement(const Eigen::VectorXd& rhs_modal) const;

  // Quadratic tensors (inputs/outputs in the nl-space):
  const std::vector<int>& nlspace() const { return nlspace_; }
  /// Q restricted cross part: sum_alpha q[alpha] * X[alpha] * m.
  Eigen::VectorXd apply_cross(const Eigen::Vector4d& q,
                              const Eigen::VectorXd& micro_nl) const;
  /// Q micro-micro part.
  Eigen::VectorXd apply_micro(const Eigen::VectorXd& a_nl,
                              const Eigen::VectorXd& b_nl) const;
  /// Exact modal image of (b.v + c(|v|^2-3))^2-type products:
  /// coefficients of e_a * e_b in the D-space, a,b in {v1,v2,v3,|v|^2-3}.
  const Eigen::MatrixXd& pair_products() const { return pair_products_; }

 private:
  void assemble();
  void assemble_tensors();

  BasisPtr basis_;
  CollisionConfig cfg_;
  VelocityFunction nu_;
  std::vector<int> dspace_, tailspace_, nlspace_;
  std::vector<int> dpos_of_flat_;  // flat modal -> position in dspace_, or -1
  std::vector<int> nlpos_of_flat_;
  Eigen::MatrixXd form_;
  Eigen::VectorXd tail_rates_;
  Eigen::MatrixXd inv_coeffs_;  // N_D x 5, orthonormal
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
  double spectral_gap_ = 0.0;
  double op_norm_ = 0.0;
  std::vector<VelocityFunction> null_basis_;
  Eigen::MatrixXd cross_[4];      // nl x nl each
  Eigen::MatrixXd micro_tensor_;  // nl x (nl*(nl+1)/2)
  Eigen::MatrixXd pair_products_;  // N_D x 10 (symmetric pairs of 4)
  mutable std::unique_ptr<Eigen::MatrixXd> dense_;
};

using OperatorPtr = std::shared_ptr<const LinearizedOperator>;

OperatorPtr assemble_L(BasisPtr basis, const CollisionConfig& cfg = {});

/// Bilinear symmetric collision operator Q(g, h); conserves mass,
/// momentum and energy exactly and satisfies L f = -2 Q(f, 1) by
/// construction. Content of the inputs beyond the operator's Galerkin
/// spaces is flagged through accuracy_warning().
VelocityFunction apply_Q(const VelocityFunction& g, const VelocityFunction& h,
                         const LinearizedOperator& op);

/// Modal-coefficient version used by the solver.
Eigen::VectorXd apply_Q_modal(const Eigen::VectorXd& g_modal,
                              const Eigen::VectorXd& h_modal,
                              const LinearizedOperator& op);

/// Relative norm of the input content dropped by the last apply_Q on this
/// thread (0 when inputs were fully representable).
double q_truncation_fraction();

/// Largest delta with <L f, f> >= delta ||(I-P) f||^2_{L2_v(nu)} on the
/// discrete space (generalized eigenvalue problem on the complement of N).
double estimate_coercivity(const LinearizedOperator& op);

/// Exact Galerkin matrix of the Dirichlet form of L on the total-degree-D
/// Hermite space (canonical simplex ordering); grid-independent.
Eigen::MatrixXd assemble_exact_form(int degree);

/// Multi-indices of the total-degree simplex in canonical order.
std::vector<std::array<int, 3>> simplex_indices(int degree);

}  // namespace vpb
