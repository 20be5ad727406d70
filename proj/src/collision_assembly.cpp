// Exact Galerkin assembly of the hard-sphere Dirichlet form
//
//   <phi', L phi> = (1/4)(1/2pi) Int M M1 |u.w| (D phi')(D phi) dw dv1 dv,
//   D phi = phi(v) + phi(v1) - phi(v') - phi(v1'),
//
// on the total-degree-D Hermite space. In center-of-mass coordinates
// v = G + u/2, v1 = G - u/2 the Gaussian G-integral is done analytically
// through the Appell shift h_n(G + t) = sum_j A_j(G) P_nj(t), where A_j is
// the monic Hermite family of the G-measure; the remaining (r, sigma,
// theta, psi) integrals are polynomial (after the exact azimuthal average)
// and are done with Gauss rules of matching exactness. The assembled
// matrix is the continuum Galerkin form up to roundoff: symmetric, PSD,
// O(3)-equivariant, with {1, v, |v|^2} exactly in its kernel.

#include <omp.h>

#include <cmath>

#include "vpb/collision.hpp"

namespace vpb {

std::vector<std::array<int, 3>> simplex_indices(int degree) {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j)
      for (int k = 0; i + j + k <= degree; ++k) out.push_back({i, j, k});
  return out;
}

namespace {

struct ShiftTables {
  int D;
  // pcoef[n][j][c]: h_n(G + t) = sum_j A_j(G) * sum_c pcoef[n][j][c] t^c
  std::vector<std::vector<std::vector<double>>> pcoef;
  std::vector<double> eta1;  // E[A_k^2] under the G-measure, per axis

  explicit ShiftTables(int degree) : D(degree) {
    int n = D + 1;
    // monomial coefficients of He_a
    std::vector<std::vector<double>> he(n, std::vector<double>(n, 0.0));
    he[0][0] = 1.0;
    if (n > 1) he[1][1] = 1.0;
    for (int a = 1; a + 1 < n; ++a)
      for (int c = 0; c <= a + 1; ++c) {
        double v = 0.0;
        if (c >= 1) v += he[a][c - 1];
        v -= a * he[a - 1][c];
        he[a + 1][c] = v;
      }
    // A_j(x) = 2^{-j/2} He_j(sqrt(2) x) (monic, orthogonal for N(0,1/2))
    std::vector<std::vector<double>> ac(n, std::vector<double>(n, 0.0));
    for (int j = 0; j < n; ++j)
      for (int c = 0; c <= j; ++c)
        ac[j][c] = he[j][c] * std::pow(2.0, 0.5 * (c - j));
    // x^c = sum_j m[c][j] A_j(x): triangular solve against the monic A
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (int c = 0; c < n; ++c) {
      m[c][c] = 1.0;
      for (int j = c - 1; j >= 0; --j) {
        double acc = 0.0;
        for (int l = j + 1; l <= c; ++l) acc += m[c][l] * ac[l][j];
        m[c][j] = -acc;
      }
    }
    // He_a(x) = sum_j T[a][j] A_j(x)
    std::vector<std::vector<double>> T(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a)
      for (int j = 0; j <= a; ++j) {
        double acc = 0.0;
        for (int c = j; c <= a; ++c) acc += he[a][c] * m[c][j];
        T[a][j] = acc;
      }
    // binomials
    std::vector<std::vector<double>> bin(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a) {
      bin[a][0] = 1.0;
      for (int b = 1; b <= a; ++b)
        bin[a][b] = bin[a - 1][b - 1] + (b <= a - 1 ? bin[a - 1][b] : 0.0);
    }
    pcoef.assign(n, {});
    double fact = 1.0;
    for (int deg = 0; deg < n; ++deg) {
      if (deg > 0) fact *= deg;
      pcoef[deg].assign(deg + 1, std::vector<double>(deg + 1, 0.0));
      double invs = 1.0 / std::sqrt(fact);
      for (int j = 0; j <= deg; ++j)
        for (int c = 0; c + j <= deg; ++c) {
          int a = deg - c;
          pcoef[deg][j][c] = invs * bin[deg][a] * T[a][j];
        }
    }
    eta1.resize(n);
    double f = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k > 0) f *= k;
      eta1[k] = f * std::pow(2.0, -k);
    }
  }

  // vals[n][j] = P_nj(t) for all n <= D, j <= n.
  void eval(double t, std::vector<std::vector<double>>& vals) const {
    int n = D + 1;
    std::vector<double> tp(n, 1.0);
    for (int c = 1; c < n; ++c) tp[c] = tp[c - 1] * t;
    vals.assign(n, {});
    for (int deg = 0; deg < n; ++deg) {
      vals[deg].assign(deg + 1, 0.0);
      for (int j = 0; j <= deg; ++j) {
        double acc = 0.0;
        for (int c = 0; c + j <= deg; ++c) acc += pcoef[deg][j][c] * tp[c];
        vals[deg][j] = acc;
      }
    }
  }
};

}  // namespace

Eigen::MatrixXd assemble_exact_form(int degree) {
  const int D = degree;
  const auto mis = simplex_indices(D);
  const int nd = static_cast<int>(mis.size());
  const ShiftTables tables(D);

  // column lists: for each j in the simplex, the positions of m >= j with
  // |m| - |j| even
  std::vector<std::vector<int>> cols(nd);
  for (int jp = 0; jp < nd; ++jp) {
    const auto& j = mis[jp];
    for (int mp = 0; mp < nd; ++mp) {
      const auto& m = mis[mp];
      if (m[0] >= j[0] && m[1] >= j[1] && m[2] >= j[2] &&
          ((m[0] + m[1] + m[2]) - (j[0] + j[1] + j[2])) % 2 == 0)
        cols[jp].push_back(mp);
    }
  }
  std::vector<double> eta(nd);
  for (int jp = 0; jp < nd; ++jp)
    eta[jp] = tables.eta1[mis[jp][0]] * tables.eta1[mis[jp][1]] *
              tables.eta1[mis[jp][2]];

  // quadrature rules
  GaussRule1d rule_r = gauss_radial_gaussian(D + 1, 3);
  GaussRule1d rule_cs = gauss_legendre(D + 1, -1.0, 1.0);  // sigma polar
  const int n_phis = 2 * D + 1;                            // sigma azimuth
  GaussRule1d rule_ct = gauss_legendre(2 * D + 1, 0.0, 1.0);  // |cos theta|
  const int n_psi = 2 * D + 1;

  const double C0 = 1.0 / (64.0 * std::pow(M_PI, 2.5));

  struct SigmaPoint {
    std::array<double, 3> sig, e1, e2;
    double w;
  };
  std::vector<SigmaPoint> sigmas;
  for (size_t ic = 0; ic < rule_cs.nodes.size(); ++ic) {
    double c = rule_cs.nodes[ic], s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < n_phis; ++j) {
      double phi = 2.0 * M_PI * j / n_phis;
      SigmaPoint p;
      p.sig = {s * std::cos(phi), s * std::sin(phi), c};
      p.w = rule_cs.weights[ic] * 2.0 * M_PI / n_phis;
      // deterministic frame
      std::array<double, 3> a = {0.0, 0.0, 1.0};
      if (std::abs(p.sig[2]) > 0.9) a = {1.0, 0.0, 0.0};
      p.e1 = {a[1] * p.sig[2] - a[2] * p.sig[1],
              a[2] * p.sig[0] - a[0] * p.sig[2],
              a[0] * p.sig[1] - a[1] * p.sig[0]};
      double nn = std::sqrt(p.e1[0] * p.e1[0] + p.e1[1] * p.e1[1] +
                            p.e1[2] * p.e1[2]);
      for (auto& x : p.e1) x /= nn;
      p.e2 = {p.sig[1] * p.e1[2] - p.sig[2] * p.e1[1],
              p.sig[2] * p.e1[0] - p.sig[0] * p.e1[2],
              p.sig[0] * p.e1[1] - p.sig[1] * p.e1[0]};
      sigmas.push_back(p);
    }
  }

  const int nthreads = omp_get_max_threads();
  std::vector<Eigen::MatrixXd> partial(nthreads,
                                       Eigen::MatrixXd::Zero(nd, nd));

#pragma omp parallel for schedule(dynamic)
  for (size_t is = 0; is < sigmas.size(); ++is) {
    Eigen::MatrixXd& acc = partial[omp_get_thread_num()];
    const SigmaPoint& sp = sigmas[is];
    std::vector<std::vector<double>> pu[3], pup[3];
    std::vector<double> cvec(nd);
    for (size_t ir = 0; ir < rule_r.nodes.size(); ++ir) {
      double r = rule_r.nodes[ir];
      std::array<double, 3> u = {r * sp.sig[0], r * sp.sig[1], r * sp.sig[2]};
      for (int d = 0; d < 3; ++d) tables.eval(0.5 * u[d], pu[d]);
      for (int sgn = -1; sgn <= 1; sgn += 2)
        for (size_t it = 0; it < rule_ct.nodes.size(); ++it) {
          double c = sgn * rule_ct.nodes[it];
          double st = std::sqrt(std::max(0.0, 1.0 - c * c));
          double wt = rule_ct.weights[it] * std::abs(c);
          double s = r * c;  // u . omega
          for (int ip = 0; ip < n_psi; ++ip) {
            double psi = 2.0 * M_PI * ip / n_psi;
            double ca = st * std::cos(psi), cb = st * std::sin(psi);
            std::array<double, 3> omega = {
                c * sp.sig[0] + ca * sp.e1[0] + cb * sp.e2[0],
                c * sp.sig[1] + ca * sp.e1[1] + cb * sp.e2[1],
                c * sp.sig[2] + ca * sp.e1[2] + cb * sp.e2[2]};
            std::array<double, 3> up = {u[0] - 2.0 * s * omega[0],
                                        u[1] - 2.0 * s * omega[1],
                                        u[2] - 2.0 * s * omega[2]};
            for (int d = 0; d < 3; ++d) tables.eval(0.5 * up[d], pup[d]);
            double wpt = C0 * rule_r.weights[ir] * sp.w * wt *
                         (2.0 * M_PI / n_psi);
            for (int jp = 0; jp < nd; ++jp) {
              const auto& j = mis[jp];
              const auto& col = cols[jp];
              if (col.empty()) continue;
              int L = static_cast<int>(col.size());
              for (int a = 0; a < L; ++a) {
                const auto& m = mis[col[a]];
                double pa = pu[0][m[0]][j[0]] * pu[1][m[1]][j[1]] *
                            pu[2][m[2]][j[2]];
                double pb = pup[0][m[0]][j[0]] * pup[1][m[1]][j[1]] *
                            pup[2][m[2]][j[2]];
                cvec[a] = 2.0 * (pa - pb);
              }
              double scale = wpt * eta[jp];
              for (int a = 0; a < L; ++a) {
                double ca2 = scale * cvec[a];
                if (ca2 == 0.0) continue;
                double* row = acc.data() + static_cast<size_t>(col[a]);
                for (int b = a; b < L; ++b)
                  row[static_cast<size_t>(col[b]) * nd] += ca2 * cvec[b];
              }
            }
          }
        }
    }
  }

  Eigen::MatrixXd form = Eigen::MatrixXd::Zero(nd, nd);
  for (int t = 0; t < nthreads; ++t) form += partial[t];
  for (int a = 0; a < nd; ++a)
    for (int b = 0; b < a; ++b) form(a, b) = form(b, a);

  // Enforce the exact O(3)-equivariance structure: zero entries across
  // per-axis parity classes and average over axis permutations.
  for (int a = 0; a < nd; ++a)
    for (int b = 0; b < nd; ++b) {
      const auto &ma = mis[a], &mb = mis[b];
      if ((ma[0] - mb[0]) % 2 || (ma[1] - mb[1]) % 2 || (ma[2] - mb[2]) % 2)
        form(a, b) = 0.0;
    }
  std::vector<int> pos(nd);
  {
    auto index_of = [&](const std::array<int, 3>& m) {
      for (int i = 0; i < nd; ++i)
        if (mis[i] == m) return i;
      return -1;
    };
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                             {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(nd, nd);
    for (const auto& p : perms) {
      for (int i = 0; i < nd; ++i)
        pos[i] = index_of({mis[i][p[0]], mis[i][p[1]], mis[i][p[2]]});
      for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b) avg(a, b) += form(pos[a], pos[b]);
    }
    form = avg / 6.0;
  }
  return form;
}

}  // namespace vpb
