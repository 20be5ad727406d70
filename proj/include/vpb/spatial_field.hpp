#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <memory>

#include "vpb/common.hpp"

namespace vpb {

/// Periodic spatial grid, uniform per axis, spectral (Fourier)
/// differentiation throughout. Flat index is row-major with the last
/// axis fastest.
class SpatialGrid {
 public:
  SpatialGrid(int dim, int points_per_axis,
              std::array<double, 3> lengths = {2.0 * M_PI, 2.0 * M_PI,
                                               2.0 * M_PI});
  ~SpatialGrid();
  SpatialGrid(const SpatialGrid&) = delete;

  int dim() const { return dim_; }
  int points_per_axis() const { return n_; }
  int size() const { return size_; }
  double length(int axis) const { return lengths_[axis]; }
  double volume() const;
  double cell_volume() const { return volume() / size_; }

  /// Coordinates of a flat index.
  std::array<double, 3> coords(int flat) const;
  /// Physical wavevector of a flat spectral index (Nyquist kept signed
  /// positive; odd-order multipliers zero it explicitly).
  const std::array<double, 3>& wavevector(int flat) const {
    return kvec_[flat];
  }
  /// / true if any integer frequency exceeds n/3 (2/3-rule target).
  bool aliased(int flat) const { return alias_[flat]; }
  /// true if the mode carries a Nyquist frequency on some axis.
  bool nyquist(int flat) const { return nyq_[flat]; }

  Eigen::VectorXcd forward(const Eigen::VectorXd& nodal) const;   // /N
  Eigen::VectorXd backward(const Eigen::VectorXcd& coeffs) const;
  Eigen::VectorXcd forward_c(const Eigen::VectorXcd& nodal) const;
  Eigen::VectorXcd backward_c(const Eigen::VectorXcd& coeffs) const;

 private:
  int dim_, n_, size_;
  std::array<double, 3> lengths_;
  std::vector<std::array<double, 3>> kvec_;
  std::vector<bool> alias_, nyq_;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const SpatialGrid>;
GridPtr build_grid(int dim, int points_per_axis,
                   std::array<double, 3> lengths = {2.0 * M_PI, 2.0 * M_PI,
                                                    2.0 * M_PI});

struct ScalarField {
  GridPtr grid;
  Eigen::VectorXd values;

  ScalarField() = default;
  explicit ScalarField(GridPtr g)
      : grid(std::move(g)), values(Eigen::VectorXd::Zero(grid->size())) {}
  ScalarField(GridPtr g, Eigen::VectorXd v)
      : grid(std::move(g)), values(std::move(v)) {
    require(values.size() == grid->size(), "ScalarField: size mismatch");
  }
};

struct VectorField {
  GridPtr grid;
  Eigen::MatrixXd values;  // size x dim

  VectorField() = default;
  explicit VectorField(GridPtr g)
      : grid(std::move(g)),
        values(Eigen::MatrixXd::Zero(grid->size(), grid->dim())) {}
  ScalarField component(int d) const { return {grid, values.col(d)}; }
};

/// d/dx_axis by the spectral multiplier i k (Nyquist zeroed).
ScalarField derivative(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
ScalarField laplacian(const ScalarField& f);

double l2_inner(const ScalarField& f, const ScalarField& g);
inline double l2_norm(const ScalarField& f) {
  return std::sqrt(l2_inner(f, f));
}

/// Unique zero-mean solution of Laplace(phi) = gamma * rho on the torus.
ScalarField solve_poisson(const ScalarField& rho, double gamma);

/// H^N norm via spectral multipliers, sum over |alpha| <= N.
double sobolev_norm(const ScalarField& f, int N);
double sobolev_norm(const VectorField& f, int N);

/// Leray projection onto divergence-free fields (mean mode untouched).
VectorField leray_project(const VectorField& u);

/// ||grad phi||^2_{L2}.
double field_energy(const ScalarField& phi);

/// Zero all modes with an integer frequency above n/3 (2/3 rule).
void dealias_23(Eigen::VectorXcd& coeffs, const SpatialGrid& grid);
/// Dealiased pointwise product of two fields.
ScalarField dealiased_product(const ScalarField& f, const ScalarField& g);

}  // namespace vpb
