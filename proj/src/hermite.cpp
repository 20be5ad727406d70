#include "vpb/hermite.hpp"

#include <cmath>

namespace vpb {

void hermite_eval(int n, double x, double* out) {
  out[0] = 1.0;
  if (n == 1) return;
  out[1] = x;
  for (int k = 1; k + 1 < n; ++k) {
    // h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1)
    out[k + 1] = (x * out[k] - std::sqrt(static_cast<double>(k)) * out[k - 1]) /
                 std::sqrt(static_cast<double>(k + 1));
  }
}

HermiteBasis::HermiteBasis(QuadraturePtr quad) : quad_(std::move(quad)) {
  n_ = quad_->nodes_per_axis();
  E1_.resize(n_, n_);
  std::vector<double> buf(n_);
  for (int i = 0; i < n_; ++i) {
    hermite_eval(n_, quad_->axis_nodes()[i], buf.data());
    for (int k = 0; k < n_; ++k) E1_(i, k) = buf[k];
  }
  B1_ = E1_.partialPivLu().inverse();
}

Eigen::VectorXd HermiteBasis::to_modal(const Eigen::VectorXd& nodal) const {
  // separable transform, one axis at a time
  Eigen::VectorXd cur = nodal;
  const int n = n_, n2 = n_ * n_;
  Eigen::VectorXd next(cur.size());
  // axis 2 (fastest)
  for (int b = 0; b < n2; ++b)
    next.segment(b * n, n) = B1_ * cur.segment(b * n, n);
  cur.swap(next);
  // axis 1
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += B1_(j, l) * cur[(i * n + l) * n + k];
        next[(i * n + j) * n + k] = s;
      }
    }
  cur.swap(next);
  // axis 0
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += B1_(i, l) * cur[(l * n + j) * n + k];
        next[(i * n + j) * n + k] = s;
      }
    }
  return next;
}

Eigen::VectorXd HermiteBasis::to_nodal(const Eigen::VectorXd& modal) const {
  Eigen::VectorXd cur = modal;
  const int n = n_, n2 = n_ * n_;
  Eigen::VectorXd next(cur.size());
  for (int b = 0; b < n2; ++b)
    next.segment(b * n, n) = E1_ * cur.segment(b * n, n);
  cur.swap(next);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += E1_(j, l) * cur[(i * n + l) * n + k];
        next[(i * n + j) * n + k] = s;
      }
    }
  cur.swap(next);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += E1_(i, l) * cur[(l * n + j) * n + k];
        next[(i * n + j) * n + k] = s;
      }
    }
  return next;
}

Eigen::VectorXd HermiteBasis::d_dv(const Eigen::VectorXd& modal, int axis) const {
  const int n = n_;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(modal.size());
  int stride = (axis == 0) ? n * n : (axis == 1) ? n : 1;
  int outer = n * n;  // number of (other-axes) combinations
  for (int b = 0; b < outer; ++b) {
    // base index with axis-coordinate zero
    int i0 = (axis == 0) ? b : (axis == 1) ? (b / n) * n * n + (b % n)
                                           : (b / n) * n * n + (b % n) * n;
    for (int k = 1; k < n; ++k)
      out[i0 + (k - 1) * stride] +=
          std::sqrt(static_cast<double>(k)) * modal[i0 + k * stride];
  }
  return out;
}

Eigen::VectorXd HermiteBasis::v_mult(const Eigen::VectorXd& modal, int axis) const {
  const int n = n_;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(modal.size());
  int stride = (axis == 0) ? n * n : (axis == 1) ? n : 1;
  int outer = n * n;
  for (int b = 0; b < outer; ++b) {
    int i0 = (axis == 0) ? b : (axis == 1) ? (b / n) * n * n + (b % n)
                                           : (b / n) * n * n + (b % n) * n;
    for (int k = 0; k < n; ++k) {
      double c = modal[i0 + k * stride];
      if (k + 1 < n)
        out[i0 + (k + 1) * stride] += std::sqrt(static_cast<double>(k + 1)) * c;
      if (k > 0)
        out[i0 + (k - 1) * stride] += std::sqrt(static_cast<double>(k)) * c;
    }
  }
  return out;
}

Eigen::VectorXd HermiteBasis::eval_point(const std::array<double, 3>& v) const {
  std::vector<double> hx(n_), hy(n_), hz(n_);
  hermite_eval(n_, v[0], hx.data());
  hermite_eval(n_, v[1], hy.data());
  hermite_eval(n_, v[2], hz.data());
  Eigen::VectorXd out(size());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      double p = hx[i] * hy[j];
      for (int k = 0; k < n_; ++k) out[flat(i, j, k)] = p * hz[k];
    }
  return out;
}

std::vector<int> HermiteBasis::total_degree_indices(int D) const {
  std::vector<int> idx;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        if (i + j + k <= D) idx.push_back(flat(i, j, k));
  return idx;
}

BasisPtr build_basis(QuadraturePtr quad) {
  return std::make_shared<const HermiteBasis>(std::move(quad));
}

}  // namespace vpb
