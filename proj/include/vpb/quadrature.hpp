#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "vpb/common.hpp"

namespace vpb {

/// One-dimensional Gauss rule: nodes x_i and weights w_i for a given
/// positive weight function on its natural support.
struct GaussRule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard Gaussian weight
/// (2*pi)^(-1/2) exp(-x^2/2); weights sum to 1.
GaussRule1d gauss_hermite(int n);

/// Gauss-Legendre rule on [a, b].
GaussRule1d gauss_legendre(int n, double a, double b);

/// Gauss rule for the weight r^p * exp(-r^2/4) on (0, inf), built by a
/// discretized Stieltjes procedure. Exact for polynomial degree <= 2n-1.
GaussRule1d gauss_radial_gaussian(int n, int p);

/// Tensor-product velocity quadrature realizing integrals against the
/// global Maxwellian M(v) = (2*pi)^(-3/2) exp(-|v|^2/2) on R^3.
///
/// Nodes are the 3-fold tensor product of a 1D Gauss-Hermite rule, with
/// an optional dilation `scaling` trading tail coverage for core
/// resolution (weights are importance-corrected and renormalized so that
/// <1,1> = 1 holds exactly).
class VelocityQuadrature {
 public:
  VelocityQuadrature(int nodes_per_axis, double scaling);

  int nodes_per_axis() const { return n_; }
  double scaling() const { return scaling_; }
  int size() const { return static_cast<int>(weights_.size()); }

  const std::array<double, 3>& node(int k) const { return nodes_[k]; }
  double weight(int k) const { return weights_[k]; }
  const std::vector<std::array<double, 3>>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// 1D abscissas (dilated) shared by all axes.
  const std::vector<double>& axis_nodes() const { return axis_nodes_; }
  const std::vector<double>& axis_weights() const { return axis_weights_; }

  /// Flat index of the node with per-axis indices (i, j, k); the last
  /// axis varies fastest.
  int flat(int i, int j, int k) const { return (i * n_ + j) * n_ + k; }

  bool compatible(const VelocityQuadrature& other) const {
    return n_ == other.n_ && scaling_ == other.scaling_;
  }

 private:
  int n_;
  double scaling_;
  std::vector<double> axis_nodes_, axis_weights_;
  std::vector<std::array<double, 3>> nodes_;
  std::vector<double> weights_;
};

using QuadraturePtr = std::shared_ptr<const VelocityQuadrature>;

QuadraturePtr build_quadrature(int nodes_per_axis, double scaling = 1.0);

}  // namespace vpb
