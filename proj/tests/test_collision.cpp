#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "vpb/collision.hpp"
#include "vpb/macro_micro.hpp"

using namespace vpb;

namespace {

CollisionConfig test_cfg() {
  CollisionConfig cfg;
  cfg.degree = 6;
  cfg.nl_degree = 5;
  cfg.pair_nodes = 5;
  cfg.theta_half = 6;
  cfg.psi = 7;
  return cfg;
}

VelocityFunction nodal_fn(BasisPtr basis, auto&& f) {
  const auto& quad = basis->quad();
  Eigen::VectorXd vals(quad.size());
  for (int k = 0; k < quad.size(); ++k) vals[k] = f(quad.node(k));
  return VelocityFunction(basis, std::move(vals));
}

VelocityFunction random_smooth(BasisPtr basis, std::mt19937_64& rng,
                               int degree) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd modal = Eigen::VectorXd::Zero(basis->size());
  auto mis = basis->total_degree_indices(degree);
  for (int idx : mis) modal[idx] = dist(rng);
  return VelocityFunction::from_modal(basis, modal);
}

// Monte-Carlo estimate of <f, L f> from the symmetrized Dirichlet integral.
double mc_dirichlet(auto&& f, long samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double acc = 0.0;
  for (long s = 0; s < samples; ++s) {
    std::array<double, 3> v = {gauss(rng), gauss(rng), gauss(rng)};
    std::array<double, 3> v1 = {gauss(rng), gauss(rng), gauss(rng)};
    double c = 2.0 * uni(rng) - 1.0;
    double phi = 2.0 * M_PI * uni(rng);
    double st = std::sqrt(std::max(0.0, 1.0 - c * c));
    std::array<double, 3> w = {st * std::cos(phi), st * std::sin(phi), c};
    std::array<double, 3> u = {v[0] - v1[0], v[1] - v1[1], v[2] - v1[2]};
    double udw = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
    std::array<double, 3> vp = {v[0] - udw * w[0], v[1] - udw * w[1],
                                v[2] - udw * w[2]};
    std::array<double, 3> v1p = {v1[0] + udw * w[0], v1[1] + udw * w[1],
                                 v1[2] + udw * w[2]};
    double d = f(v) + f(v1) - f(vp) - f(v1p);
    acc += 0.5 * std::abs(udw) * d * d;
  }
  return acc / samples;
}

}  // namespace

TEST_CASE("angular rule invariants") {
  for (int order : {4, 8, 12}) {
    AngularRule rule = AngularRule::product(order);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(std::abs(wsum - 4.0 * M_PI) < 1e-12 * 4.0 * M_PI);
    // exactness on low spherical polynomials: int w_i = 0, int w_i w_j =
    // (4pi/3) delta_ij, int w_1^2 w_2^2 = 4pi/15
    Eigen::Vector3d m1 = Eigen::Vector3d::Zero();
    Eigen::Matrix3d m2 = Eigen::Matrix3d::Zero();
    double m1122 = 0.0;
    for (size_t k = 0; k < rule.directions.size(); ++k) {
      Eigen::Vector3d d(rule.directions[k][0], rule.directions[k][1],
                        rule.directions[k][2]);
      m1 += rule.weights[k] * d;
      m2 += rule.weights[k] * d * d.transpose();
      m1122 += rule.weights[k] * d[0] * d[0] * d[1] * d[1];
    }
    CHECK(m1.norm() < 1e-12);
    CHECK((m2 - (4.0 * M_PI / 3.0) * Eigen::Matrix3d::Identity()).norm() <
          1e-10);
    CHECK(std::abs(m1122 - 4.0 * M_PI / 15.0) < 1e-10);
  }
  AngularRule ad = AngularRule::adapted(6, 7, {0.6, 0.64, 0.48});
  double wsum = 0.0;
  for (double w : ad.weights) wsum += w;
  CHECK(std::abs(wsum - 4.0 * M_PI) < 1e-10);
}

TEST_CASE("exact form: kernel, PSD, MC cross-check") {
  const int D = 5;
  Eigen::MatrixXd form = assemble_exact_form(D);
  auto mis = simplex_indices(D);
  const int nd = static_cast<int>(mis.size());
  REQUIRE(form.rows() == nd);

  CHECK((form - form.transpose()).norm() < 1e-13 * form.norm());

  auto pos_of = [&](int a, int b, int c) {
    for (int i = 0; i < nd; ++i)
      if (mis[i] == std::array<int, 3>{a, b, c}) return i;
    return -1;
  };
  // invariants annihilated: 1, v_d, |v|^2
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(nd);
  e0[pos_of(0, 0, 0)] = 1.0;
  CHECK((form * e0).norm() < 1e-12 * form.norm());
  Eigen::VectorXd ev = Eigen::VectorXd::Zero(nd);
  ev[pos_of(0, 1, 0)] = 1.0;
  CHECK((form * ev).norm() < 1e-12 * form.norm());
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(nd);
  e2[pos_of(2, 0, 0)] = 1.0;
  e2[pos_of(0, 2, 0)] = 1.0;
  e2[pos_of(0, 0, 2)] = 1.0;
  CHECK((form * e2).norm() < 1e-12 * form.norm());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form);
  CHECK(es.eigenvalues()(0) > -1e-12 * form.norm());
  int zeros = 0;
  for (int i = 0; i < nd; ++i)
    if (es.eigenvalues()(i) < 1e-8 * es.eigenvalues()(nd - 1)) ++zeros;
  CHECK(zeros == 5);

  // Monte-Carlo of the Dirichlet integral for f = v1 v2
  Eigen::VectorXd f12 = Eigen::VectorXd::Zero(nd);
  f12[pos_of(1, 1, 0)] = 1.0;
  double exact = f12.dot(form * f12);
  double mc = mc_dirichlet(
      [](const std::array<double, 3>& v) { return v[0] * v[1]; }, 4000000,
      12345u);
  CHECK(std::abs(mc - exact) < 0.02 * std::abs(exact));

  // and for the radial function |v|^2 (|v|^2 - 5), orthogonal to the kernel
  Eigen::VectorXd fr = Eigen::VectorXd::Zero(nd);
  // |v|^4 = sum_d (sqrt(24) h4(v_d) + 6 sqrt(2) h2(v_d) + 3)/..., easier:
  // build from the quadrature transform
  {
    auto basis = build_basis(build_quadrature(8, 1.0));
    auto fn = nodal_fn(basis, [](const auto& v) {
      double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      return r2 * (r2 - 5.0);
    });
    Eigen::VectorXd modal = fn.modal();
    for (int i = 0; i < nd; ++i)
      fr[i] = modal[basis->flat(mis[i][0], mis[i][1], mis[i][2])];
  }
  double exact_r = fr.dot(form * fr);
  double mc_r = mc_dirichlet(
      [](const std::array<double, 3>& v) {
        double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        return r2 * (r2 - 5.0);
      },
      4000000, 777u);
  CHECK(std::abs(mc_r - exact_r) < 0.02 * std::abs(exact_r));
}

TEST_CASE("linearized operator structure") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  auto op = assemble_L(basis, test_cfg());

  // L e = 0 for the five invariants, as nodal functions
  for (const auto& e : op->null_basis()) {
    double resid = std::sqrt(inner_product(op->apply(e), op->apply(e)));
    CHECK(resid <= op->tol_null() * op->norm());
  }
  CHECK(op->near_null_count() == 5);
  CHECK(op->spectral_gap() > 0.0);

  std::mt19937_64 rng(99);
  // self-adjointness in the quadrature form, 50 random pairs
  for (int t = 0; t < 50; ++t) {
    auto f = random_smooth(basis, rng, basis->max_degree());
    auto g = random_smooth(basis, rng, basis->max_degree());
    double lhs = inner_product(op->apply(f), g);
    double rhs = inner_product(f, op->apply(g));
    double scale = op->norm() * std::sqrt(inner_product(f, f)) *
                   std::sqrt(inner_product(g, g));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * scale);
  }
  // positive semi-definiteness
  for (int t = 0; t < 50; ++t) {
    auto f = random_smooth(basis, rng, basis->max_degree());
    CHECK(inner_product(op->apply(f), f) >= -1e-8 * op->norm() *
                                                inner_product(f, f));
  }
  // L f = -2 Q(f, 1) on random f
  auto one = nodal_fn(basis, [](const auto&) { return 1.0; });
  for (int t = 0; t < 20; ++t) {
    auto f = random_smooth(basis, rng, basis->max_degree());
    auto lf = op->apply(f);
    auto q = apply_Q(f, one, *op);
    double err = (lf.nodal() + 2.0 * q.nodal()).norm();
    CHECK(err <= 1e-8 * std::max(1.0, lf.nodal().norm()));
  }
}

TEST_CASE("coercivity estimate") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  auto op = assemble_L(basis, test_cfg());
  double delta = estimate_coercivity(*op);
  CHECK(delta > 0.0);

  auto nu = op->nu();
  std::mt19937_64 rng(2024);
  double min_ratio = 1e30;
  for (int t = 0; t < 1000; ++t) {
    auto f = random_smooth(basis, rng, basis->max_degree());
    Eigen::VectorXd micro = f.modal() - op->project_N_modal(f.modal());
    VelocityFunction mf = VelocityFunction::from_modal(basis, micro);
    double num = inner_product(op->apply(mf), mf);
    double den = inner_product(mf, mf, Weight::nu, &nu);
    if (den > 1e-14) min_ratio = std::min(min_ratio, num / den);
  }
  CHECK(delta <= min_ratio * (1.0 + 1e-6));
  // tight at the kernel: both sides vanish
  auto e = op->null_basis()[2];
  CHECK(inner_product(op->apply(e), e) < 1e-12);
}

TEST_CASE("coercivity stable under refinement") {
  CollisionConfig cfg = test_cfg();
  auto op8 = assemble_L(build_basis(build_quadrature(8, 1.0)), cfg);
  auto op10 = assemble_L(build_basis(build_quadrature(10, 1.0)), cfg);
  double d8 = estimate_coercivity(*op8);
  double d10 = estimate_coercivity(*op10);
  CHECK(std::abs(d8 - d10) < 0.05 * d8);
}

TEST_CASE("Q structure and conservation") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  auto op = assemble_L(basis, test_cfg());
  auto one = nodal_fn(basis, [](const auto&) { return 1.0; });

  // Q(1,1) = 0
  auto q11 = apply_Q(one, one, *op);
  CHECK(q11.nodal().norm() < 1e-12);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    auto g = random_smooth(basis, rng, 5);
    auto h = random_smooth(basis, rng, 5);
    auto q = apply_Q(g, h, *op);
    // symmetry
    auto q2 = apply_Q(h, g, *op);
    CHECK((q.nodal() - q2.nodal()).norm() < 1e-12 * (1.0 + q.nodal().norm()));
    // conservation against the invariants
    for (const auto& e : op->null_basis()) {
      double m = inner_product(q, e);
      CHECK(std::abs(m) < 1e-6 * (1.0 + q.nodal().norm()));
    }
  }
}

TEST_CASE("Q against Monte-Carlo collision integral") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  CollisionConfig cfg = test_cfg();
  cfg.degree = 7;
  auto op = assemble_L(basis, cfg);
  auto g = nodal_fn(basis, [](const auto& v) { return v[0]; });
  auto qgg = apply_Q(g, g, *op);

  // Q(g,g)(v) = (1/2pi) Int M1 (g' g1' - g g1)|u.w| dw dv1, estimated by
  // sampling v1 ~ N(0,I3), w ~ U(S2); factor 4pi/2pi = 2.
  std::mt19937_64 rng(31415);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto mc_at = [&](const std::array<double, 3>& v, long samples) {
    double acc = 0.0;
    for (long s = 0; s < samples; ++s) {
      std::array<double, 3> v1 = {gauss(rng), gauss(rng), gauss(rng)};
      double c = 2.0 * uni(rng) - 1.0;
      double phi = 2.0 * M_PI * uni(rng);
      double st = std::sqrt(std::max(0.0, 1.0 - c * c));
      std::array<double, 3> w = {st * std::cos(phi), st * std::sin(phi), c};
      std::array<double, 3> u = {v[0] - v1[0], v[1] - v1[1], v[2] - v1[2]};
      double udw = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
      double gp = v[0] - udw * w[0];
      double g1p = v1[0] + udw * w[0];
      acc += 2.0 * std::abs(udw) * (gp * g1p - v[0] * v1[0]);
    }
    return acc / samples;
  };

  // compare at a set of core nodes in the weighted norm
  double num = 0.0, den = 0.0;
  const auto& quad = basis->quad();
  for (int k = 0; k < quad.size(); ++k) {
    const auto& v = quad.node(k);
    double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (r2 > 4.0) continue;  // core nodes where MC noise is controlled
    double ref = mc_at(v, 400000);
    double val = qgg.nodal()[k];
    num += quad.weight(k) * (val - ref) * (val - ref);
    den += quad.weight(k) * ref * ref;
  }
  CHECK(std::sqrt(num / den) < 0.01);
}

TEST_CASE("trilinear bound and collision-pair nu property") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  auto op = assemble_L(basis, test_cfg());
  auto nu = op->nu();
  std::mt19937_64 rng(5150);
  double cmax = 0.0;
  for (int t = 0; t < 200; ++t) {
    auto g1 = random_smooth(basis, rng, 5);
    auto g2 = random_smooth(basis, rng, 5);
    auto g3 = random_smooth(basis, rng, 5);
    double lhs = std::abs(inner_product(apply_Q(g1, g2, *op), g3));
    auto nrm = [&](const VelocityFunction& f, bool weighted) {
      return std::sqrt(weighted ? inner_product(f, f, Weight::nu, &nu)
                                : inner_product(f, f));
    };
    double bound = nrm(g1, true) * nrm(g2, false) * nrm(g3, true) +
                   nrm(g2, true) * nrm(g1, false) * nrm(g3, true);
    cmax = std::max(cmax, lhs / bound);
  }
  CHECK(cmax < 10.0);  // fitted constant stays modest

  // nu(v) + nu(v*) <= C3 (nu(v') + nu(v1')) over sampled collision pairs
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double c3 = 0.0;
  for (int t = 0; t < 2000; ++t) {
    std::array<double, 3> v = {gauss(rng), gauss(rng), gauss(rng)};
    std::array<double, 3> v1 = {gauss(rng), gauss(rng), gauss(rng)};
    double c = 2.0 * uni(rng) - 1.0;
    double phi = 2.0 * M_PI * uni(rng);
    double st = std::sqrt(std::max(0.0, 1.0 - c * c));
    std::array<double, 3> w = {st * std::cos(phi), st * std::sin(phi), c};
    std::array<double, 3> u = {v[0] - v1[0], v[1] - v1[1], v[2] - v1[2]};
    double udw = u[0] * w[0] + u[1] * w[1] + u[2] * w[2];
    auto speed = [](const std::array<double, 3>& x) {
      return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    };
    std::array<double, 3> vp = {v[0] - udw * w[0], v[1] - udw * w[1],
                                v[2] - udw * w[2]};
    std::array<double, 3> v1p = {v1[0] + udw * w[0], v1[1] + udw * w[1],
                                 v1[2] + udw * w[2]};
    double lhs = collision_frequency_radial(speed(v)) +
                 collision_frequency_radial(speed(v1));
    double rhs = collision_frequency_radial(speed(vp)) +
                 collision_frequency_radial(speed(v1p));
    c3 = std::max(c3, lhs / rhs);
  }
  CHECK(c3 < 3.0);
}

TEST_CASE("operator cache round trip") {
  auto basis = build_basis(build_quadrature(6, 1.0));
  CollisionConfig cfg = test_cfg();
  cfg.degree = 5;
  auto op = assemble_L(basis, cfg);
  std::string path = "op_cache_test.bin";
  op->write_cache(path);
  Eigen::MatrixXd loaded =
      LinearizedOperator::read_cache(path, 6, 1.0, 2 * cfg.theta_half);
  CHECK((loaded - op->matrix()).norm() == 0.0);  // byte-identical reload
  // header mismatch rejected
  CHECK_THROWS_AS(LinearizedOperator::read_cache(path, 8, 1.0, 12),
                  StructuralError);
  std::remove(path.c_str());
}
