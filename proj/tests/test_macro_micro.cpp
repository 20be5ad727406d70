#include <cmath>
#include <random>

#include "doctest.h"
#include "vpb/macro_micro.hpp"

using namespace vpb;

namespace {

VelocityFunction nodal_fn(BasisPtr basis, auto&& f) {
  const auto& quad = basis->quad();
  Eigen::VectorXd vals(quad.size());
  for (int k = 0; k < quad.size(); ++k) vals[k] = f(quad.node(k));
  return VelocityFunction(basis, std::move(vals));
}

VelocityFunction random_fn(BasisPtr basis, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd vals(basis->size());
  for (int k = 0; k < basis->size(); ++k) vals[k] = dist(rng);
  return VelocityFunction(basis, std::move(vals));
}

}  // namespace

TEST_CASE("projection coefficients on the invariants") {
  auto basis = build_basis(build_quadrature(8, 1.0));

  auto one = nodal_fn(basis, [](const auto&) { return 1.0; });
  auto [m1, p1] = project_P(one);
  CHECK(std::abs(m1.a - 1.0) < 1e-12);
  CHECK(m1.b.norm() < 1e-12);
  CHECK(std::abs(m1.c) < 1e-12);
  CHECK((p1.nodal() - one.nodal()).norm() < 1e-10);

  auto v2 = nodal_fn(basis, [](const auto& v) {
    return v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  });
  auto [m2, p2] = project_P(v2);
  CHECK(std::abs(m2.a) < 1e-10);
  CHECK(std::abs(m2.c - 1.0) < 1e-10);
  CHECK((p2.nodal() - v2.nodal()).norm() < 1e-9);

  auto v1sq = nodal_fn(basis, [](const auto& v) { return v[0] * v[0]; });
  auto [m3, p3] = project_P(v1sq);
  CHECK(std::abs(m3.a) < 1e-10);
  CHECK(std::abs(m3.c - 1.0 / 3.0) < 1e-10);

  // moment reproduction: <Pg,1> = a+3c, <Pg,v_i> = b_i, <Pg,|v|^2> = 3a+15c
  std::mt19937_64 rng(4);
  auto g = random_fn(basis, rng);
  auto [m, pg] = project_P(g);
  auto mom = extract_macro(pg);
  CHECK(std::abs(mom.a - m.a) < 1e-10);
  CHECK((mom.b - m.b).norm() < 1e-10);
  CHECK(std::abs(mom.c - m.c) < 1e-10);
}

TEST_CASE("projection identities") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    auto f = random_fn(basis, rng);
    auto g = random_fn(basis, rng);
    auto [mf, pf] = project_P(f);
    auto [mg, pg] = project_P(g);
    VelocityFunction qf(basis, f.nodal() - pf.nodal());
    VelocityFunction qg(basis, g.nodal() - pg.nodal());
    // idempotence
    auto [mpf, ppf] = project_P(pf);
    CHECK((ppf.nodal() - pf.nodal()).norm() < 1e-10 * (1 + pf.nodal().norm()));
    auto [mqf, pqf] = project_P(qf);
    CHECK(pqf.nodal().norm() < 1e-10 * (1 + qf.nodal().norm()));
    // orthogonality and Pythagoras
    CHECK(std::abs(inner_product(pf, qg)) < 1e-10);
    double full = inner_product(f, f);
    CHECK(std::abs(full - inner_product(pf, pf) - inner_product(qf, qf)) <
          1e-10 * full);
  }
  // P(v . grad phi) stays in span{v}: its micro part vanishes
  Eigen::Vector3d gp(0.3, -1.1, 0.7);
  auto vlin = nodal_fn(basis, [&](const auto& v) {
    return gp[0] * v[0] + gp[1] * v[1] + gp[2] * v[2];
  });
  auto [mv, pv] = project_P(vlin);
  CHECK((pv.nodal() - vlin.nodal()).norm() < 1e-10);
}

TEST_CASE("micro part of v . grad(P g) matches the A, B closure") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  Eigen::Vector3d ga(0.2, -0.4, 1.0), gc(-0.3, 0.8, 0.15);
  Eigen::Matrix3d gb;
  gb << 0.5, -0.2, 0.1, 0.9, 0.0, -0.7, 0.3, 0.25, -0.55;
  auto term = nodal_fn(basis, [&](const auto& v) {
    double acc = 0.0;
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    for (int k = 0; k < 3; ++k) {
      acc += v[k] * ga[k] + v[k] * v2 * gc[k];
      for (int l = 0; l < 3; ++l) acc += v[k] * v[l] * gb(k, l);
    }
    return acc;
  });
  auto [m, p] = project_P(term);
  Eigen::VectorXd micro = term.nodal() - p.nodal();
  Eigen::VectorXd expect(basis->size());
  for (int k = 0; k < basis->size(); ++k) {
    const auto& v = basis->quad().node(k);
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      acc += 2.0 * (0.5 * v2 - 2.5) * v[i] * gc[i];  // 2 B . grad c
      for (int j = 0; j < 3; ++j)
        acc += (v[i] * v[j] - (i == j ? v2 / 3.0 : 0.0)) * gb(i, j);
    }
    expect[k] = acc;
  }
  CHECK((micro - expect).norm() < 1e-8 * expect.norm());
}

TEST_CASE("thirteen moment basis") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  ThirteenMomentBasis tm(basis);

  // biorthogonality, all 169 pairs
  for (int j = 0; j < 13; ++j)
    for (int k = 0; k < 13; ++k) {
      double d = inner_product(tm.e(j), tm.e_dual(k));
      CHECK(std::abs(d - (j == k ? 1.0 : 0.0)) < 1e-10);
    }

  // Gram entries against closed-form Gaussian moments
  CHECK(std::abs(tm.gram()(ThirteenMomentBasis::idx_v2(0),
                           ThirteenMomentBasis::idx_v2(0)) -
                 3.0) < 1e-10);
  CHECK(std::abs(tm.gram()(ThirteenMomentBasis::idx_v2(0),
                           ThirteenMomentBasis::idx_v2(1)) -
                 1.0) < 1e-10);
  CHECK(std::abs(tm.gram()(ThirteenMomentBasis::idx_v(0),
                           ThirteenMomentBasis::idx_vv2(0)) -
                 5.0) < 1e-10);

  // coefficient extraction is exact on the span
  auto f = nodal_fn(basis, [](const auto& v) {
    return 2.0 * v[0] * v[1] + v[2];
  });
  Eigen::VectorXd coef = tm.extract_source_coefficients(f);
  for (int k = 0; k < 13; ++k) {
    double expect = 0.0;
    if (k == ThirteenMomentBasis::idx_vij(0, 1)) expect = 2.0;
    if (k == ThirteenMomentBasis::idx_v(2)) expect = 1.0;
    CHECK(std::abs(coef[k] - expect) < 1e-10);
  }
  // zero in, zero out; unit slots
  Eigen::VectorXd z = tm.extract_source_coefficients(
      nodal_fn(basis, [](const auto&) { return 0.0; }));
  CHECK(z.norm() < 1e-14);
  for (int j = 0; j < 13; ++j) {
    Eigen::VectorXd u = tm.extract_source_coefficients(tm.e(j));
    for (int k = 0; k < 13; ++k)
      CHECK(std::abs(u[k] - (j == k ? 1.0 : 0.0)) < 1e-10);
  }

  // source coefficients of v . grad(P g) against hand-computed moments
  Eigen::Vector3d ga(0.7, -0.1, 0.4), gc(0.2, 0.9, -0.6);
  Eigen::Matrix3d gb;
  gb << 0.1, 0.3, -0.2, 0.0, -0.8, 0.5, 0.6, 0.2, 0.4;
  auto term = nodal_fn(basis, [&](const auto& v) {
    double acc = 0.0;
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    for (int k = 0; k < 3; ++k) {
      acc += v[k] * ga[k] + v[k] * v2 * gc[k];
      for (int l = 0; l < 3; ++l) acc += v[k] * v[l] * gb(k, l);
    }
    return acc;
  });
  Eigen::VectorXd c13 = tm.extract_source_coefficients(term);
  CHECK(std::abs(c13[ThirteenMomentBasis::idx_one()]) < 1e-10);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(c13[ThirteenMomentBasis::idx_v(i)] - ga[i]) < 1e-10);
    CHECK(std::abs(c13[ThirteenMomentBasis::idx_v2(i)] - gb(i, i)) < 1e-10);
    CHECK(std::abs(c13[ThirteenMomentBasis::idx_vv2(i)] - gc[i]) < 1e-10);
    for (int j = i + 1; j < 3; ++j)
      CHECK(std::abs(c13[ThirteenMomentBasis::idx_vij(i, j)] -
                     (gb(i, j) + gb(j, i))) < 1e-10);
  }

  // zeta combinations extract the matching coefficient blocks
  CHECK(std::abs(inner_product(term, tm.zeta(1)) + gc[1]) < 1e-10);
  double z00 = inner_product(term, tm.zeta(0, 0));
  CHECK(std::abs(z00 - (gb(1, 1) + gb(2, 2) - gb(0, 0))) < 1e-10);
  double z01 = inner_product(term, tm.zeta(0, 1));
  CHECK(std::abs(z01 + gb(0, 1) + gb(1, 0)) < 1e-10);
}

TEST_CASE("micro flux moments") {
  auto basis = build_basis(build_quadrature(8, 1.0));
  auto zero = nodal_fn(basis, [](const auto&) { return 0.0; });
  auto [a0, b0] = micro_flux(zero);
  CHECK(a0.norm() < 1e-14);
  CHECK(b0.norm() < 1e-14);

  auto a12 = nodal_fn(basis, [](const auto& v) { return v[0] * v[1]; });
  auto [am, bm] = micro_flux(a12);
  Eigen::Matrix3d expect = Eigen::Matrix3d::Zero();
  expect(0, 1) = expect(1, 0) = 1.0;
  CHECK((am - expect).norm() < 1e-10);
  CHECK(bm.norm() < 1e-10);

  auto b1 = nodal_fn(basis, [](const auto& v) {
    double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    return (0.5 * v2 - 2.5) * v[0];
  });
  auto [ab, bb] = micro_flux(b1);
  CHECK(std::abs(bb[0] - 5.0) < 1e-10);
  CHECK(std::abs(bb[1]) < 1e-10);
  CHECK(ab.norm() < 1e-10);

  auto hydro = nodal_fn(basis, [](const auto& v) { return 1.0 + v[0]; });
  CHECK_THROWS_AS(micro_flux(hydro), StructuralError);
}

TEST_CASE("thirteen basis rejects degenerate quadrature") {
  CHECK_THROWS(ThirteenMomentBasis(build_basis(build_quadrature(4, 1.0))));
}
