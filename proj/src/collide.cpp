// Quadratic collision tensors and the bilinear operator Q.
//
// Q is split along the hydrodynamic decomposition of its arguments:
// components on the constant take the exact route Q(f, 1) = -1/2 L f,
// fluid-fluid pairs take the exact identity Q(q, q') = 1/2 L(q q') for
// q, q' in Ker L, and the micro-involving parts are Galerkin tensors
// assembled from the symmetrized weak form of the collision integral.
// This keeps Q bilinear, symmetric, exactly conservative, and exactly
// consistent with L.

#include <omp.h>

#include <cmath>
#include <fstream>

#include "vpb/collision.hpp"

namespace vpb {
namespace {

thread_local double g_trunc_fraction = 0.0;

struct PairQuadrature {
  std::vector<std::array<double, 3>> nodes;
  std::vector<double> weights;
};

PairQuadrature pair_rule(int n) {
  GaussRule1d gh = gauss_hermite(n);
  PairQuadrature q;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        q.nodes.push_back({gh.nodes[i], gh.nodes[j], gh.nodes[k]});
        q.weights.push_back(gh.weights[i] * gh.weights[j] * gh.weights[k]);
      }
  return q;
}

// values of the simplex basis at a point
void eval_simplex(const std::vector<std::array<int, 3>>& mis, int maxdeg,
                  const std::array<double, 3>& v, Eigen::VectorXd& out) {
  double hx[32], hy[32], hz[32];
  hermite_eval(maxdeg + 1, v[0], hx);
  hermite_eval(maxdeg + 1, v[1], hy);
  hermite_eval(maxdeg + 1, v[2], hz);
  for (size_t p = 0; p < mis.size(); ++p)
    out[p] = hx[mis[p][0]] * hy[mis[p][1]] * hz[mis[p][2]];
}

// e_alpha: v1, v2, v3, (|v|^2 - 3)/sqrt(6)
double eval_invariant(int alpha, const std::array<double, 3>& v) {
  if (alpha < 3) return v[alpha];
  return (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] - 3.0) / std::sqrt(6.0);
}

}  // namespace

double q_truncation_fraction() { return g_trunc_fraction; }

void LinearizedOperator::assemble_tensors() {
  const auto nl_mis = simplex_indices(cfg_.nl_degree);
  const int nnl = static_cast<int>(nl_mis.size());
  nlspace_.resize(nnl);
  nlpos_of_flat_.assign(basis_->size(), -1);
  for (int p = 0; p < nnl; ++p) {
    nlspace_[p] = basis_->flat(nl_mis[p][0], nl_mis[p][1], nl_mis[p][2]);
    nlpos_of_flat_[nlspace_[p]] = p;
  }
  const int mm_degree = std::min(4, cfg_.nl_degree);
  const auto mm_mis = simplex_indices(mm_degree);
  const int nmm = static_cast<int>(mm_mis.size());
  const int npack = nmm * (nmm + 1) / 2;

  // exact modal products e_alpha * e_beta in the Galerkin space
  {
    const auto& quad = basis_->quad();
    pair_products_.resize(static_cast<int>(dspace_.size()), 10);
    int col = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b, ++col) {
        Eigen::VectorXd prod(quad.size());
        for (int k = 0; k < quad.size(); ++k)
          prod[k] = eval_invariant(a, quad.node(k)) *
                    eval_invariant(b, quad.node(k));
        Eigen::VectorXd modal = basis_->to_modal(prod);
        for (size_t p = 0; p < dspace_.size(); ++p)
          pair_products_(static_cast<int>(p), col) = modal[dspace_[p]];
      }
  }

  std::string cache;
  if (!cfg_.cache_dir.empty()) {
    cache = cfg_.cache_dir + "/qtensors_D" + std::to_string(cfg_.degree) +
            "_nl" + std::to_string(cfg_.nl_degree) + "_p" +
            std::to_string(cfg_.pair_nodes) + "_a" +
            std::to_string(cfg_.theta_half) + "x" + std::to_string(cfg_.psi) +
            ".bin";
    std::ifstream in(cache, std::ios::binary);
    if (in) {
      for (int a = 0; a < 4; ++a) {
        cross_[a].resize(nnl, nnl);
        in.read(reinterpret_cast<char*>(cross_[a].data()),
                sizeof(double) * nnl * nnl);
      }
      micro_tensor_.resize(nnl, npack);
      in.read(reinterpret_cast<char*>(micro_tensor_.data()),
              sizeof(double) * nnl * npack);
      if (in.good()) return;
    }
  }

  for (int a = 0; a < 4; ++a) cross_[a] = Eigen::MatrixXd::Zero(nnl, nnl);
  micro_tensor_ = Eigen::MatrixXd::Zero(nnl, npack);

  PairQuadrature pq = pair_rule(cfg_.pair_nodes);
  const int np = static_cast<int>(pq.nodes.size());
  GaussRule1d rule_ct = gauss_legendre(cfg_.theta_half, 0.0, 1.0);
  const int npsi = cfg_.psi;
  const double wf = 0.125 / (2.0 * M_PI);  // (1/8)(1/2pi)

  struct Pair {
    int i, j;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j) pairs.push_back({i, j});

  // positions of the micro-micro simplex inside the nl simplex
  std::vector<int> mm_in_nl(nmm);
  for (int p = 0; p < nmm; ++p)
    for (int q = 0; q < nnl; ++q)
      if (nl_mis[q] == mm_mis[p]) {
        mm_in_nl[p] = q;
        break;
      }

  const int nthreads = omp_get_max_threads();
  std::vector<Eigen::MatrixXd> pc(nthreads * 4);
  std::vector<Eigen::MatrixXd> pm(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    for (int a = 0; a < 4; ++a) pc[t * 4 + a] = Eigen::MatrixXd::Zero(nnl, nnl);
    pm[t] = Eigen::MatrixXd::Zero(nnl, npack);
  }

#pragma omp parallel for schedule(dynamic, 64)
  for (size_t ip = 0; ip < pairs.size(); ++ip) {
    int tid = omp_get_thread_num();
    const auto& v = pq.nodes[pairs[ip].i];
    const auto& v1 = pq.nodes[pairs[ip].j];
    double wpair = 2.0 * pq.weights[pairs[ip].i] * pq.weights[pairs[ip].j];
    std::array<double, 3> u = {v[0] - v1[0], v[1] - v1[1], v[2] - v1[2]};
    double r = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    if (r < 1e-14) continue;
    std::array<double, 3> axis = {u[0] / r, u[1] / r, u[2] / r};
    // canonical sign so that (i,j) and (j,i) share the rule
    for (int d = 0; d < 3; ++d) {
      if (std::abs(axis[d]) > 1e-14) {
        if (axis[d] < 0)
          for (auto& c : axis) c = -c;
        break;
      }
    }
    std::array<double, 3> a_ref = {0.0, 0.0, 1.0};
    if (std::abs(axis[2]) > 0.9) a_ref = {1.0, 0.0, 0.0};
    std::array<double, 3> e1 = {a_ref[1] * axis[2] - a_ref[2] * axis[1],
                                a_ref[2] * axis[0] - a_ref[0] * axis[2],
                                a_ref[0] * axis[1] - a_ref[1] * axis[0]};
    double nn = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (auto& c : e1) c /= nn;
    std::array<double, 3> e2 = {axis[1] * e1[2] - axis[2] * e1[1],
                                axis[2] * e1[0] - axis[0] * e1[2],
                                axis[0] * e1[1] - axis[1] * e1[0]};

    Eigen::VectorXd P(nnl), R(nnl), S(nnl), U(nnl), D(nnl), T(nnl);
    Eigen::VectorXd Pm(nmm), Rm(nmm), Sm(nmm), Um(nmm);
    eval_simplex(nl_mis, cfg_.nl_degree, v, P);
    eval_simplex(nl_mis, cfg_.nl_degree, v1, R);
    for (int p = 0; p < nmm; ++p) {
      Pm[p] = P[mm_in_nl[p]];
      Rm[p] = R[mm_in_nl[p]];
    }
    double ea_v[4], ea_v1[4], ea_vp[4], ea_v1p[4];
    for (int a = 0; a < 4; ++a) {
      ea_v[a] = eval_invariant(a, v);
      ea_v1[a] = eval_invariant(a, v1);
    }

    for (int sgn = -1; sgn <= 1; sgn += 2)
      for (size_t it = 0; it < rule_ct.nodes.size(); ++it) {
        double c = sgn * rule_ct.nodes[it];
        double st = std::sqrt(std::max(0.0, 1.0 - c * c));
        double wtheta = rule_ct.weights[it] * std::abs(c) * r;  // |u.w|
        for (int ipsi = 0; ipsi < npsi; ++ipsi) {
          double psi = 2.0 * M_PI * ipsi / npsi;
          double ca = st * std::cos(psi), cb = st * std::sin(psi);
          std::array<double, 3> omega = {c * axis[0] + ca * e1[0] + cb * e2[0],
                                         c * axis[1] + ca * e1[1] + cb * e2[1],
                                         c * axis[2] + ca * e1[2] + cb * e2[2]};
          double s = u[0] * omega[0] + u[1] * omega[1] + u[2] * omega[2];
          std::array<double, 3> vp = {v[0] - s * omega[0], v[1] - s * omega[1],
                                      v[2] - s * omega[2]};
          std::array<double, 3> v1p = {v1[0] + s * omega[0],
                                       v1[1] + s * omega[1],
                                       v1[2] + s * omega[2]};
          eval_simplex(nl_mis, cfg_.nl_degree, vp, S);
          eval_simplex(nl_mis, cfg_.nl_degree, v1p, U);
          for (int p = 0; p < nmm; ++p) {
            Sm[p] = S[mm_in_nl[p]];
            Um[p] = U[mm_in_nl[p]];
          }
          D = P + R - S - U;
          double w = wf * wpair * wtheta * (2.0 * M_PI / npsi);
          for (int a = 0; a < 4; ++a) {
            ea_vp[a] = eval_invariant(a, vp);
            ea_v1p[a] = eval_invariant(a, v1p);
            // T[m] = ea' U[m] + S[m] ea1' - ea R[m] - P[m] ea1
            T = ea_vp[a] * U + ea_v1p[a] * S - ea_v[a] * R - ea_v1[a] * P;
            pc[tid * 4 + a].noalias() += (w * D) * T.transpose();
          }
          // micro-micro: symmetric kernel over packed (m1 <= m2)
          Eigen::MatrixXd& mt = pm[tid];
          int col = 0;
          for (int m1 = 0; m1 < nmm; ++m1)
            for (int m2 = m1; m2 < nmm; ++m2, ++col) {
              double t = Sm[m1] * Um[m2] + Um[m1] * Sm[m2] - Pm[m1] * Rm[m2] -
                         Rm[m1] * Pm[m2];
              mt.col(col).noalias() += (w * t) * D;
            }
        }
      }
  }
  for (int t = 0; t < nthreads; ++t) {
    for (int a = 0; a < 4; ++a) cross_[a] += pc[t * 4 + a];
    micro_tensor_ += pm[t];
  }

  if (!cache.empty()) {
    std::ofstream out(cache, std::ios::binary);
    for (int a = 0; a < 4; ++a)
      out.write(reinterpret_cast<const char*>(cross_[a].data()),
                sizeof(double) * nnl * nnl);
    out.write(reinterpret_cast<const char*>(micro_tensor_.data()),
              sizeof(double) * nnl * npack);
  }
}

Eigen::VectorXd LinearizedOperator::apply_cross(
    const Eigen::Vector4d& q, const Eigen::VectorXd& micro_nl) const {
  const int nnl = static_cast<int>(nlspace_.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nnl);
  for (int a = 0; a < 4; ++a)
    if (q[a] != 0.0) out.noalias() += q[a] * (cross_[a] * micro_nl);
  return out;
}

Eigen::VectorXd LinearizedOperator::apply_micro(
    const Eigen::VectorXd& a_nl, const Eigen::VectorXd& b_nl) const {
  const int mm_degree = std::min(4, cfg_.nl_degree);
  const auto mm_mis = simplex_indices(mm_degree);
  const int nmm = static_cast<int>(mm_mis.size());
  Eigen::VectorXd packed(nmm * (nmm + 1) / 2);
  int col = 0;
  for (int m1 = 0; m1 < nmm; ++m1)
    for (int m2 = m1; m2 < nmm; ++m2, ++col) {
      packed[col] = (m1 == m2) ? a_nl[m1] * b_nl[m1]
                               : a_nl[m1] * b_nl[m2] + a_nl[m2] * b_nl[m1];
    }
  return micro_tensor_ * packed;
}

Eigen::VectorXd apply_Q_modal(const Eigen::VectorXd& g_modal,
                              const Eigen::VectorXd& h_modal,
                              const LinearizedOperator& op) {
  const auto& basis = op.basis();
  const int nv = basis.size();
  auto mode = [&](int a, int b, int c) { return basis.flat(a, b, c); };
  const double isq3 = 1.0 / std::sqrt(3.0);

  auto macro_of = [&](const Eigen::VectorXd& x, double& c0,
                      Eigen::Vector4d& q) {
    c0 = x[mode(0, 0, 0)];
    q[0] = x[mode(1, 0, 0)];
    q[1] = x[mode(0, 1, 0)];
    q[2] = x[mode(0, 0, 1)];
    q[3] = isq3 *
           (x[mode(2, 0, 0)] + x[mode(0, 2, 0)] + x[mode(0, 0, 2)]);
  };
  double cg, ch;
  Eigen::Vector4d qg, qh;
  macro_of(g_modal, cg, qg);
  macro_of(h_modal, ch, qh);

  Eigen::VectorXd mg = g_modal - op.project_N_modal(g_modal);
  Eigen::VectorXd mh = h_modal - op.project_N_modal(h_modal);

  // restrictions to the tensor spaces, tracking dropped content
  const auto& nl = op.nlspace();
  const int nnl = static_cast<int>(nl.size());
  Eigen::VectorXd mg_nl(nnl), mh_nl(nnl);
  double kept = 0.0;
  for (int p = 0; p < nnl; ++p) {
    mg_nl[p] = mg[nl[p]];
    mh_nl[p] = mh[nl[p]];
    kept += mg_nl[p] * mg_nl[p] + mh_nl[p] * mh_nl[p];
  }
  double total = mg.squaredNorm() + mh.squaredNorm();
  g_trunc_fraction =
      total > 0.0 ? std::sqrt(std::max(0.0, 1.0 - kept / total)) : 0.0;

  const int mm_degree = std::min(4, op.config().nl_degree);
  const int nmm = static_cast<int>(simplex_indices(mm_degree).size());

  Eigen::VectorXd out = Eigen::VectorXd::Zero(nv);
  // constant components: Q(f, 1) = -1/2 L f
  out.noalias() -= 0.5 * ch * op.apply_modal(g_modal);
  out.noalias() -= 0.5 * cg * op.apply_modal(h_modal);
  // fluid-fluid: Q(q, q') = 1/2 L(q q') through the exact product map
  Eigen::VectorXd prod_coeffs = Eigen::VectorXd::Zero(10);
  {
    int col = 0;
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b, ++col)
        prod_coeffs[col] =
            (a == b) ? qg[a] * qh[a] : qg[a] * qh[b] + qg[b] * qh[a];
  }
  Eigen::VectorXd prod_d = op.pair_products() * prod_coeffs;
  {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(nv);
    const auto& ds = op.dspace();
    for (size_t p = 0; p < ds.size(); ++p) full[ds[p]] = prod_d[p];
    out.noalias() += 0.5 * op.apply_modal(full);
  }
  // cross and micro-micro tensors
  Eigen::VectorXd qout = op.apply_cross(qg, mh_nl) + op.apply_cross(qh, mg_nl);
  qout.noalias() += op.apply_micro(mg_nl.head(nmm), mh_nl.head(nmm));
  for (int p = 0; p < nnl; ++p) out[nl[p]] += qout[p];
  return out;
}

VelocityFunction apply_Q(const VelocityFunction& g, const VelocityFunction& h,
                         const LinearizedOperator& op) {
  require(g.compatible(h), "apply_Q: arguments on different quadratures");
  return VelocityFunction::from_modal(
      op.basis_ptr(), apply_Q_modal(g.modal(), h.modal(), op));
}

}  // namespace vpb
