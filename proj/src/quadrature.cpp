#include "vpb/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace vpb {

GaussRule1d gauss_hermite(int n) {
  require(n >= 1, "gauss_hermite: n >= 1 required");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite
  // recurrence: off-diagonal sqrt(k).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(static_cast<double>(k));
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule1d rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;  // zeroth moment of the unit Gaussian is 1
  }
  return rule;
}

GaussRule1d gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre: n >= 1 required");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double kk = static_cast<double>(k);
    double beta = kk / std::sqrt(4.0 * kk * kk - 1.0);
    J(k, k - 1) = beta;
    J(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule1d rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);  // on [-1, 1]
    double w = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (b - a) * x + 0.5 * (a + b);
    rule.weights[i] = 0.5 * (b - a) * w;
  }
  return rule;
}

GaussRule1d gauss_radial_gaussian(int n, int p) {
  require(n >= 1 && p >= 0, "gauss_radial_gaussian: bad arguments");
  // Discretized Stieltjes: build recurrence coefficients of the monic
  // orthogonal polynomials for w(r) = r^p exp(-r^2/4) from a fine
  // composite Gauss-Legendre discretization of (0, rmax].
  const double rmax = 40.0;
  const int panels = 80, per_panel = 24;
  std::vector<double> xs, ws;
  xs.reserve(panels * per_panel);
  ws.reserve(panels * per_panel);
  for (int pa = 0; pa < panels; ++pa) {
    double a = rmax * pa / panels, b = rmax * (pa + 1) / panels;
    GaussRule1d g = gauss_legendre(per_panel, a, b);
    for (int i = 0; i < per_panel; ++i) {
      double r = g.nodes[i];
      xs.push_back(r);
      ws.push_back(g.weights[i] * std::pow(r, p) * std::exp(-0.25 * r * r));
    }
  }
  // Stieltjes with monic orthogonal polynomials p_{-1} = 0, p_0 = 1,
  // p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}.
  const int m = static_cast<int>(xs.size());
  std::vector<double> p_prev(m, 0.0), p_cur(m, 1.0);
  std::vector<double> alpha(n), beta(n, 0.0);
  double norm_cur = 0.0, mean = 0.0;
  for (int i = 0; i < m; ++i) {
    norm_cur += ws[i];
    mean += ws[i] * xs[i];
  }
  const double mu0 = norm_cur;
  alpha[0] = mean / norm_cur;
  for (int k = 1; k < n; ++k) {
    std::vector<double> p_next(m);
    for (int i = 0; i < m; ++i)
      p_next[i] = (xs[i] - alpha[k - 1]) * p_cur[i] - beta[k - 1] * p_prev[i];
    double norm_prev = norm_cur;
    norm_cur = 0.0;
    mean = 0.0;
    for (int i = 0; i < m; ++i) {
      double q = ws[i] * p_next[i];
      norm_cur += q * p_next[i];
      mean += q * xs[i] * p_next[i];
    }
    alpha[k] = mean / norm_cur;
    beta[k] = norm_cur / norm_prev;
    p_prev.swap(p_cur);
    p_cur.swap(p_next);
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) J(k, k) = alpha[k];
  for (int k = 1; k < n; ++k) {
    double b = std::sqrt(beta[k]);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussRule1d rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    rule.weights[i] = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return rule;
}

VelocityQuadrature::VelocityQuadrature(int nodes_per_axis, double scaling)
    : n_(nodes_per_axis), scaling_(scaling) {
  require(nodes_per_axis >= 4,
          "VelocityQuadrature: nodes_per_axis >= 4 required to resolve the "
          "five collision invariants");
  require(scaling > 0.0, "VelocityQuadrature: scaling must be positive");

  GaussRule1d gh = gauss_hermite(n_);
  axis_nodes_.resize(n_);
  axis_weights_.resize(n_);
  double axis_sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    double y = gh.nodes[i];
    axis_nodes_[i] = scaling_ * y;
    // importance correction: integrate f against the unit Gaussian using
    // dilated abscissas
    axis_weights_[i] =
        gh.weights[i] * scaling_ * std::exp(0.5 * (1.0 - scaling_ * scaling_) * y * y);
    axis_sum += axis_weights_[i];
  }
  for (int i = 0; i < n_; ++i) axis_weights_[i] /= axis_sum;

  nodes_.resize(static_cast<size_t>(n_) * n_ * n_);
  weights_.resize(nodes_.size());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) {
        int idx = flat(i, j, k);
        nodes_[idx] = {axis_nodes_[i], axis_nodes_[j], axis_nodes_[k]};
        weights_[idx] = axis_weights_[i] * axis_weights_[j] * axis_weights_[k];
      }
}

QuadraturePtr build_quadrature(int nodes_per_axis, double scaling) {
  return std::make_shared<const VelocityQuadrature>(nodes_per_axis, scaling);
}

}  // namespace vpb
