// Sonine-Galerkin reference for the transport coefficients.
//
// Expand A^ in A_ij(v) L_k^{(5/2)}(|v|^2/2) and B^ in B_i(v)
// L_k^{(3/2)}(|v|^2/2); the Galerkin matrices are the contracted bracket
// integrals of the Dirichlet form, evaluated by direct numerical
// quadrature in center-of-mass variables with the Gaussian barycenter
// integral done on a tensor Gauss-Hermite grid. No Hermite shift algebra,
// no velocity grid, no assembled operator: an independent code path.

#include <omp.h>

#include <cmath>

#include "vpb/transport.hpp"

namespace vpb {
namespace {

// generalized Laguerre L_k^{(a)}(x), k = 0..K-1
void laguerre_eval(int K, double a, double x, double* out) {
  out[0] = 1.0;
  if (K == 1) return;
  out[1] = 1.0 + a - x;
  for (int k = 1; k + 1 < K; ++k)
    out[k + 1] = ((2 * k + 1 + a - x) * out[k] - (k + a) * out[k - 1]) / (k + 1);
}

// sum_ij A_ij(x) A_ij(y) = (x.y)^2 - |x|^2 |y|^2 / 3
double contractA(const std::array<double, 3>& x, const std::array<double, 3>& y) {
  double d = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  double y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  return d * d - x2 * y2 / 3.0;
}

// sum_i B_i(x) B_i(y) = (|x|^2/2 - 5/2)(|y|^2/2 - 5/2) (x.y)
double contractB(const std::array<double, 3>& x, const std::array<double, 3>& y) {
  double d = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
  double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  double y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  return (0.5 * x2 - 2.5) * (0.5 * y2 - 2.5) * d;
}

}  // namespace

SonineResult sonine_transport_oracle(int orders) {
  const int K = orders;
  // rhs vectors by exact radial quadrature:
  //   bA_k = int M (2/3)|v|^4 L_k^{(5/2)}(|v|^2/2) dv
  //   bB_k = int M (|v|^2/2 - 5/2)^2 |v|^2 L_k^{(3/2)}(|v|^2/2) dv
  Eigen::VectorXd bA = Eigen::VectorXd::Zero(K), bB = Eigen::VectorXd::Zero(K);
  {
    GaussRule1d rad = gauss_radial_gaussian(40, 2);  // r^2 e^{-r^2/4}, r = |v|
    // change of weight: M dv = (2pi)^{-3/2} 4 pi r^2 e^{-r^2/2} dr; fold
    // e^{-r^2/2} = e^{-r^2/4} * e^{-r^2/4}
    std::vector<double> lagA(K), lagB(K);
    for (size_t q = 0; q < rad.nodes.size(); ++q) {
      double r = rad.nodes[q];
      double w = rad.weights[q] * std::exp(-0.25 * r * r) * 4.0 * M_PI /
                 std::pow(2.0 * M_PI, 1.5);
      double r2 = r * r;
      laguerre_eval(K, 2.5, 0.5 * r2, lagA.data());
      laguerre_eval(K, 1.5, 0.5 * r2, lagB.data());
      for (int k = 0; k < K; ++k) {
        bA[k] += w * (2.0 / 3.0) * r2 * r2 * lagA[k];
        bB[k] += w * (0.5 * r2 - 2.5) * (0.5 * r2 - 2.5) * r2 * lagB[k];
      }
    }
  }

  require(K >= 1 && K <= 8, "sonine_transport_oracle: orders in [1, 8]");
  // bracket matrices by center-of-mass quadrature
  const int maxdeg = 2 + 2 * (K - 1);      // polynomial degree of one factor
  const int updeg = 2 * maxdeg;            // total (u, u') power of products
  GaussRule1d rule_g = gauss_hermite(maxdeg + 1);  // variance-1 nodes
  // G-measure is N(0, 1/2) per axis: dilate nodes by 1/sqrt(2)
  std::vector<double> gnodes(rule_g.nodes);
  for (auto& x : gnodes) x /= std::sqrt(2.0);
  GaussRule1d rule_r = gauss_radial_gaussian(updeg / 2 + 2, 3);
  GaussRule1d rule_ct = gauss_legendre(updeg + 1, 0.0, 1.0);
  const int npsi = updeg + 1;

  const int ng = static_cast<int>(gnodes.size());
  struct GPoint {
    std::array<double, 3> G;
    double w;
  };
  std::vector<GPoint> gpts;
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j)
      for (int k = 0; k < ng; ++k)
        gpts.push_back({{gnodes[i], gnodes[j], gnodes[k]},
                        rule_g.weights[i] * rule_g.weights[j] *
                            rule_g.weights[k]});

  // (1/4)(1/2pi) * [4 pi from the contracted sigma average] *
  // [(2pi)^{-3} pi^{3/2} from the barycenter Gaussian] = 1/(16 pi^{3/2})
  const double pref = 1.0 / (16.0 * std::pow(M_PI, 1.5));
  const int nthreads = omp_get_max_threads();
  std::vector<Eigen::MatrixXd> MA(nthreads, Eigen::MatrixXd::Zero(K, K));
  std::vector<Eigen::MatrixXd> MB(nthreads, Eigen::MatrixXd::Zero(K, K));

#pragma omp parallel for schedule(dynamic)
  for (size_t ig = 0; ig < gpts.size(); ++ig) {
    int tid = omp_get_thread_num();
    const auto& gp = gpts[ig];
    double SA[4][8], SB[4][8];  // radial factors at the four points
    for (size_t ir = 0; ir < rule_r.nodes.size(); ++ir) {
      double r = rule_r.nodes[ir];
      std::array<double, 3> v = {gp.G[0], gp.G[1], gp.G[2] + 0.5 * r};
      std::array<double, 3> v1 = {gp.G[0], gp.G[1], gp.G[2] - 0.5 * r};
      for (int sgn = -1; sgn <= 1; sgn += 2)
        for (size_t it = 0; it < rule_ct.nodes.size(); ++it) {
          double c = sgn * rule_ct.nodes[it];
          double st = std::sqrt(std::max(0.0, 1.0 - c * c));
          // |u.w| = r|c|; the radial factor r is carried by the p=3 rule
          double wct = rule_ct.weights[it] * std::abs(c);
          for (int ip = 0; ip < npsi; ++ip) {
            double psi = 2.0 * M_PI * ip / npsi;
            std::array<double, 3> omega = {st * std::cos(psi),
                                           st * std::sin(psi), c};
            double s = r * c;  // u . omega with u = r e3
            std::array<double, 3> vp = {v[0] - s * omega[0],
                                        v[1] - s * omega[1],
                                        v[2] - s * omega[2]};
            std::array<double, 3> v1p = {v1[0] + s * omega[0],
                                         v1[1] + s * omega[1],
                                         v1[2] + s * omega[2]};
            const std::array<double, 3> pts[4] = {v, v1, vp, v1p};
            const double sign[4] = {1.0, 1.0, -1.0, -1.0};
            for (int p = 0; p < 4; ++p) {
              double r2 = pts[p][0] * pts[p][0] + pts[p][1] * pts[p][1] +
                          pts[p][2] * pts[p][2];
              laguerre_eval(K, 2.5, 0.5 * r2, SA[p]);
              laguerre_eval(K, 1.5, 0.5 * r2, SB[p]);
            }
            double w = pref * gp.w * rule_r.weights[ir] * wct *
                       (2.0 * M_PI / npsi);
            // Delta(A_ij S_k) Delta(A_ij S_l) summed over ij:
            // sum_{p,q} sign_p sign_q S_k(p) S_l(q) contractA(pts_p, pts_q)
            double TA[4][4], TB[4][4];
            for (int p = 0; p < 4; ++p)
              for (int q = 0; q < 4; ++q) {
                TA[p][q] = contractA(pts[p], pts[q]);
                TB[p][q] = contractB(pts[p], pts[q]);
              }
            for (int k = 0; k < K; ++k)
              for (int l = k; l < K; ++l) {
                double accA = 0.0, accB = 0.0;
                for (int p = 0; p < 4; ++p)
                  for (int q = 0; q < 4; ++q) {
                    double sgn2 = sign[p] * sign[q];
                    accA += sgn2 * SA[p][k] * SA[q][l] * TA[p][q];
                    accB += sgn2 * SB[p][k] * SB[q][l] * TB[p][q];
                  }
                MA[tid](k, l) += w * accA;
                MB[tid](k, l) += w * accB;
              }
          }
        }
    }
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K), B = Eigen::MatrixXd::Zero(K, K);
  for (int t = 0; t < nthreads; ++t) {
    A += MA[t];
    B += MB[t];
  }
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < k; ++l) {
      A(k, l) = A(l, k);
      B(k, l) = B(l, k);
    }

  SonineResult out;
  for (int ord = 1; ord <= K; ++ord) {
    Eigen::VectorXd cA = A.topLeftCorner(ord, ord)
                             .ldlt()
                             .solve(bA.head(ord));
    Eigen::VectorXd cB = B.topLeftCorner(ord, ord)
                             .ldlt()
                             .solve(bB.head(ord));
    out.mu_by_order.push_back(bA.head(ord).dot(cA) / 15.0);
    out.kappa_by_order.push_back(2.0 * bB.head(ord).dot(cB) / 15.0);
  }
  out.mu = out.mu_by_order.back();
  out.kappa = out.kappa_by_order.back();
  return out;
}

}  // namespace vpb
