#include "vpb/macro_micro.hpp"

namespace vpb {
namespace {

Eigen::VectorXd moments_012(const VelocityFunction& g) {
  // <g,1>, <g,v_i>, <g,|v|^2>
  const auto& quad = g.basis().quad();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(5);
  for (int k = 0; k < quad.size(); ++k) {
    const auto& v = quad.node(k);
    double w = quad.weight(k) * g.nodal()[k];
    m[0] += w;
    m[1] += w * v[0];
    m[2] += w * v[1];
    m[3] += w * v[2];
    m[4] += w * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  return m;
}

}  // namespace

MacroPoint extract_macro(const VelocityFunction& g) {
  Eigen::VectorXd m = moments_012(g);
  MacroPoint out;
  out.a = 0.5 * (5.0 * m[0] - m[4]);
  out.b = Eigen::Vector3d(m[1], m[2], m[3]);
  out.c = (m[4] - 3.0 * m[0]) / 6.0;
  return out;
}

MacroPoint extract_macro_modal(const Eigen::VectorXd& modal,
                               const HermiteBasis& basis) {
  // <g,1> = coeff(0), <g,v_i> = coeff(e_i),
  // <g,|v|^2> = 3 coeff(0) + sqrt(2) * sum coeff(2 e_i)
  MacroPoint out;
  double m0 = modal[basis.flat(0, 0, 0)];
  double m2 = 3.0 * m0 +
              std::sqrt(2.0) * (modal[basis.flat(2, 0, 0)] +
                                modal[basis.flat(0, 2, 0)] +
                                modal[basis.flat(0, 0, 2)]);
  out.a = 0.5 * (5.0 * m0 - m2);
  out.b = Eigen::Vector3d(modal[basis.flat(1, 0, 0)],
                          modal[basis.flat(0, 1, 0)],
                          modal[basis.flat(0, 0, 1)]);
  out.c = (m2 - 3.0 * m0) / 6.0;
  return out;
}

VelocityFunction reconstruct_P(const MacroPoint& m, BasisPtr basis) {
  const auto& quad = basis->quad();
  Eigen::VectorXd vals(quad.size());
  for (int k = 0; k < quad.size(); ++k) {
    const auto& v = quad.node(k);
    vals[k] = m.a + m.b[0] * v[0] + m.b[1] * v[1] + m.b[2] * v[2] +
              m.c * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  return VelocityFunction(basis, std::move(vals));
}

std::pair<MacroPoint, VelocityFunction> project_P(const VelocityFunction& g) {
  MacroPoint m = extract_macro(g);
  return {m, reconstruct_P(m, g.basis_ptr())};
}

int ThirteenMomentBasis::idx_vij(int i, int j) {
  if (i > j) std::swap(i, j);
  if (i == 0) return j == 1 ? 10 : 11;
  return 12;  // (1,2)
}

ThirteenMomentBasis::ThirteenMomentBasis(BasisPtr basis) : basis_(basis) {
  require(basis_->quad().nodes_per_axis() >= 5,
          "ThirteenMomentBasis: quadrature must be exact to degree >= 8");
  const auto& quad = basis_->quad();
  const int nv = quad.size();
  auto make = [&](auto&& f) {
    Eigen::VectorXd vals(nv);
    for (int k = 0; k < nv; ++k) vals[k] = f(quad.node(k));
    return VelocityFunction(basis_, std::move(vals));
  };
  primal_.reserve(13);
  primal_.push_back(make([](const auto&) { return 1.0; }));
  for (int i = 0; i < 3; ++i)
    primal_.push_back(make([i](const auto& v) { return v[i]; }));
  for (int i = 0; i < 3; ++i)
    primal_.push_back(make([i](const auto& v) { return v[i] * v[i]; }));
  for (int i = 0; i < 3; ++i)
    primal_.push_back(make([i](const auto& v) {
      return v[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }));
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      primal_.push_back(make([i, j](const auto& v) { return v[i] * v[j]; }));

  gram_.resize(13, 13);
  for (int a = 0; a < 13; ++a)
    for (int b = a; b < 13; ++b)
      gram_(a, b) = gram_(b, a) = inner_product(primal_[a], primal_[b]);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram_);
  double cond = svd.singularValues()(0) / svd.singularValues()(12);
  require_numeric(cond < 1e12,
                  "ThirteenMomentBasis: Gram condition number " +
                      std::to_string(cond) + " (quadrature too coarse)");

  Eigen::MatrixXd C = gram_.ldlt().solve(Eigen::MatrixXd::Identity(13, 13));
  dual_.reserve(13);
  for (int k = 0; k < 13; ++k) {
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(nv);
    for (int j = 0; j < 13; ++j) vals += C(k, j) * primal_[j].nodal();
    dual_.push_back(VelocityFunction(basis_, std::move(vals)));
  }

  // zeta_i(v): -Delta_x c closure, from the v_i|v|^2 rows
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd vals = -dual_[idx_vv2(i)].nodal();
    zeta_i_[i] = VelocityFunction(basis_, std::move(vals));
  }
  // zeta_ij(v): -Delta_x b_i closure, from the v_j^2 and v_i v_j rows
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::VectorXd vals;
      if (i == j) {
        vals = -dual_[idx_v2(i)].nodal();
        for (int l = 0; l < 3; ++l)
          if (l != i) vals += dual_[idx_v2(l)].nodal();
      } else {
        vals = -dual_[idx_vij(i, j)].nodal();
      }
      zeta_ij_[i][j] = VelocityFunction(basis_, std::move(vals));
    }
}

Eigen::VectorXd ThirteenMomentBasis::extract_source_coefficients(
    const VelocityFunction& term) const {
  Eigen::VectorXd out(13);
  for (int k = 0; k < 13; ++k) out[k] = inner_product(term, dual_[k]);
  return out;
}

std::pair<Eigen::Matrix3d, Eigen::Vector3d> micro_flux(
    const VelocityFunction& g_micro) {
  MacroPoint m = extract_macro(g_micro);
  double pnorm = std::sqrt(m.a * m.a + m.b.squaredNorm() + m.c * m.c);
  double gnorm = std::sqrt(inner_product(g_micro, g_micro));
  require(pnorm <= 1e-8 * std::max(1.0, gnorm),
          "micro_flux: input has a hydrodynamic component");
  const auto& quad = g_micro.basis().quad();
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d B = Eigen::Vector3d::Zero();
  for (int k = 0; k < quad.size(); ++k) {
    const auto& v = quad.node(k);
    double w = quad.weight(k) * g_micro.nodal()[k];
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    for (int i = 0; i < 3; ++i) {
      B[i] += w * v2 * v[i];
      for (int j = 0; j < 3; ++j) A(i, j) += w * v[i] * v[j];
    }
  }
  return {A, B};
}

}  // namespace vpb
