#include <cmath>

#include "vpb/velocity_function.hpp"

namespace vpb {
namespace {

// Angular average of |v - v1| over the unit sphere in v1-direction:
// int_{-1}^{1} sqrt(r^2 + s^2 - 2 r s t) dt = ((r+s)^3 - |r-s|^3) / (3 r s).
double kernel_radial(double r, double s) {
  double plus = r + s, minus = std::abs(r - s);
  return (plus * plus * plus - minus * minus * minus) / (3.0 * r * s);
}

}  // namespace

double collision_frequency_radial(double speed) {
  // nu(|v|) = (2 pi)^(-3/2) * 2 pi * int_0^inf s^2 e^{-s^2/2} A(r, s) ds
  // with A the angular average above. Composite Gauss-Legendre panels,
  // refined until the result is converged well below 1e-10.
  const double r = speed;
  auto integrand = [r](double s) {
    double a = (r < 1e-8)
                   // r -> 0 limit: A -> 2 s + r^2/(3 s) * O(1); use exact
                   // limit 2 s (relative error O(r^2))
                   ? 2.0 * s
                   : kernel_radial(r, s);
    return s * s * std::exp(-0.5 * s * s) * a;
  };
  const double smax = 14.0 + r;
  double prev = 0.0;
  for (int panels = 16; panels <= 256; panels *= 2) {
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      double a = smax * p / panels, b = smax * (p + 1) / panels;
      static thread_local GaussRule1d cache = gauss_legendre(16, 0.0, 1.0);
      for (int i = 0; i < 16; ++i) {
        double x = a + (b - a) * cache.nodes[i];
        total += (b - a) * cache.weights[i] * integrand(x);
      }
    }
    total *= 2.0 * M_PI / std::pow(2.0 * M_PI, 1.5);
    if (panels > 16 && std::abs(total - prev) < 1e-13 * (1.0 + std::abs(total)))
      return total;
    prev = total;
  }
  return prev;
}

VelocityFunction collision_frequency(BasisPtr basis) {
  const auto& quad = basis->quad();
  Eigen::VectorXd vals(quad.size());
  // nu depends on |v| only; cache by squared speed to exploit the grid's
  // cubic symmetry.
  std::vector<std::pair<double, double>> cache;
  for (int k = 0; k < quad.size(); ++k) {
    const auto& v = quad.node(k);
    double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    double found = -1.0;
    for (const auto& [key, val] : cache)
      if (std::abs(key - r2) < 1e-12 * (1.0 + key)) {
        found = val;
        break;
      }
    if (found < 0.0) {
      found = collision_frequency_radial(std::sqrt(r2));
      cache.emplace_back(r2, found);
    }
    vals[k] = found;
  }
  return VelocityFunction(basis, std::move(vals));
}

}  // namespace vpb
