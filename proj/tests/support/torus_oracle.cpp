#include "torus_oracle.hpp"

#include "ctrap/gauss_legendre.hpp"
#include "ctrap/summation.hpp"

#include <cmath>
#include <numbers>

namespace ctrap::testing {

double torus_layer_potential(KernelType type, const Torus& torus,
                             const std::function<double(double, double)>& density, double theta_star,
                             double phi_star, const OracleOptions& opt) {
  const double pi = std::numbers::pi;
  const int n = opt.panels;
  const double w = 2 * pi / n;
  const Eigen::Vector3d xstar = torus.point(theta_star, phi_star);
  const Eigen::Vector3d nx = torus.outward_normal(theta_star, phi_star);
  auto integrand = [&](double t, double p) {
    return kernel_eval(type, xstar, nx, torus.point(t, p), torus.outward_normal(t, p)) *
           density(t, p) * torus.area_element(t);
  };
  const auto far = gauss_legendre<double>(opt.order);
  const auto close = gauss_legendre<double>(opt.order_near);
  const auto duffy = gauss_legendre<double>(opt.order_duffy);

  KahanSum<double> total;
  // Cell (i, j) covers [theta* + (i - n/2) w, +w] x [phi* + (j - n/2) w, +w].
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int di = i < n / 2 ? n / 2 - 1 - i : i - n / 2;
      const int dj = j < n / 2 ? n / 2 - 1 - j : j - n / 2;
      const double t0 = theta_star + (i - n / 2) * w;
      const double p0 = phi_star + (j - n / 2) * w;
      if (di == 0 && dj == 0) {
        // Singular corner at the target: two Duffy triangles.
        const double st = i < n / 2 ? -1.0 : 1.0;
        const double sp = j < n / 2 ? -1.0 : 1.0;
        double cell = 0;
        for (std::size_t a = 0; a < duffy.nodes.size(); ++a) {
          const double u = 0.5 * (duffy.nodes[a] + 1);
          for (std::size_t b = 0; b < duffy.nodes.size(); ++b) {
            const double v = 0.5 * (duffy.nodes[b] + 1);
            const double wt = 0.25 * duffy.weights[a] * duffy.weights[b] * u * w * w;
            cell += wt * integrand(theta_star + st * w * u, phi_star + sp * w * u * v);
            cell += wt * integrand(theta_star + st * w * u * v, phi_star + sp * w * u);
          }
        }
        total += cell;
        continue;
      }
      const auto& rule = std::max(di, dj) < opt.near ? close : far;
      double cell = 0;
      for (std::size_t a = 0; a < rule.nodes.size(); ++a) {
        const double t = t0 + 0.5 * w * (rule.nodes[a] + 1);
        for (std::size_t b = 0; b < rule.nodes.size(); ++b) {
          const double p = p0 + 0.5 * w * (rule.nodes[b] + 1);
          cell += rule.weights[a] * rule.weights[b] * integrand(t, p);
        }
      }
      total += 0.25 * w * w * cell;
    }
  }
  return total.value();
}

}  // namespace ctrap::testing
