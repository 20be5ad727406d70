#include <cmath>

#include "vpb/collision.hpp"

namespace vpb {
namespace {

// Deterministic orthonormal frame completing `axis`.
void frame_of(const std::array<double, 3>& axis, std::array<double, 3>& e1,
              std::array<double, 3>& e2) {
  std::array<double, 3> a = {0.0, 0.0, 1.0};
  if (std::abs(axis[2]) > 0.9) a = {1.0, 0.0, 0.0};
  // e1 = normalize(a x axis)
  e1 = {a[1] * axis[2] - a[2] * axis[1], a[2] * axis[0] - a[0] * axis[2],
        a[0] * axis[1] - a[1] * axis[0]};
  double n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  for (auto& c : e1) c /= n;
  e2 = {axis[1] * e1[2] - axis[2] * e1[1], axis[2] * e1[0] - axis[0] * e1[2],
        axis[0] * e1[1] - axis[1] * e1[0]};
}

}  // namespace

AngularRule AngularRule::product(int order) {
  int npolar = order / 2 + 1;
  int nazi = order + 1;
  GaussRule1d gl = gauss_legendre(npolar, -1.0, 1.0);
  AngularRule rule;
  rule.order = order;
  for (int i = 0; i < npolar; ++i) {
    double c = gl.nodes[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < nazi; ++j) {
      double phi = 2.0 * M_PI * j / nazi;
      rule.directions.push_back({s * std::cos(phi), s * std::sin(phi), c});
      rule.weights.push_back(gl.weights[i] * 2.0 * M_PI / nazi);
    }
  }
  return rule;
}

AngularRule AngularRule::adapted(int n_theta_half, int n_psi,
                                 const std::array<double, 3>& axis) {
  std::array<double, 3> e1, e2;
  frame_of(axis, e1, e2);
  GaussRule1d gl = gauss_legendre(n_theta_half, 0.0, 1.0);
  AngularRule rule;
  rule.order = 2 * n_theta_half - 1;
  for (int sgn = -1; sgn <= 1; sgn += 2)
    for (int i = 0; i < n_theta_half; ++i) {
      double c = sgn * gl.nodes[i];
      double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < n_psi; ++j) {
        double psi = 2.0 * M_PI * j / n_psi;
        double a = s * std::cos(psi), b = s * std::sin(psi);
        rule.directions.push_back({c * axis[0] + a * e1[0] + b * e2[0],
                                   c * axis[1] + a * e1[1] + b * e2[1],
                                   c * axis[2] + a * e1[2] + b * e2[2]});
        rule.weights.push_back(gl.weights[i] * 2.0 * M_PI / n_psi);
      }
    }
  return rule;
}

}  // namespace vpb
