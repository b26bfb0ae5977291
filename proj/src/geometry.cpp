#include "ctrap/geometry.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace ctrap {

namespace {

constexpr std::array<int, 4> kSteps = {-2, -1, 1, 2};
constexpr std::array<double, 4> kFirst = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};

Eigen::Vector3d unit(int a) { return Eigen::Vector3d::Unit(a); }

/// Right-handed tangent pair; tau1 along the tangential part of e_x, or e_y when e_x is nearly normal.
Eigen::Vector3d tie_break_tangent(const Eigen::Vector3d& n) {
  Eigen::Vector3d t = unit(0) - n.x() * n;
  if (t.norm() < 0.1) t = unit(1) - n.y() * n;
  return t.normalized();
}

}  // namespace

Eigen::Vector3d fd4_gradient(const std::function<double(const Eigen::Vector3d&)>& f,
                             const Eigen::Vector3d& z, double h) {
  Eigen::Vector3d g;
  for (int a = 0; a < 3; ++a) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += kFirst[i] * f(z + kSteps[i] * h * unit(a));
    g(a) = s / h;
  }
  return g;
}

Eigen::Matrix3d fd4_hessian(const std::function<double(const Eigen::Vector3d&)>& f,
                            const Eigen::Vector3d& z, double h) {
  Eigen::Matrix3d H;
  const double f0 = f(z);
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector3d e = h * unit(a);
    H(a, a) = (-f(z + 2 * e) + 16 * f(z + e) - 30 * f0 + 16 * f(z - e) - f(z - 2 * e)) / (12 * h * h);
    for (int b = a + 1; b < 3; ++b) {
      double s = 0;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          s += kFirst[i] * kFirst[j] * f(z + kSteps[i] * h * unit(a) + kSteps[j] * h * unit(b));
        }
      }
      H(a, b) = H(b, a) = s / (h * h);
    }
  }
  return H;
}

OffsetFrame hessian_eigenframe(const SurfaceHandle& surface, const Eigen::Vector3d& zbar, double h) {
  const auto d = [&](const Eigen::Vector3d& x) { return surface.distance(x); };
  const Eigen::Vector3d grad = fd4_gradient(d, zbar, h);
  const Eigen::Matrix3d H = fd4_hessian(d, zbar, h);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
  const Eigen::Matrix3d V = es.eigenvectors();
  int in = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(V.col(i).dot(grad)) > std::abs(V.col(in).dot(grad))) in = i;
  }
  OffsetFrame fr;
  fr.n = V.col(in) * (V.col(in).dot(grad) < 0 ? -1.0 : 1.0);
  int t1 = (in + 1) % 3, t2 = (in + 2) % 3;
  if (es.eigenvalues()(t2) > es.eigenvalues()(t1)) std::swap(t1, t2);
  fr.curvatures.g1 = es.eigenvalues()(t1);
  fr.curvatures.g2 = es.eigenvalues()(t2);
  fr.curvatures.eta = surface.distance(zbar);
  fr.umbilic = std::abs(fr.curvatures.g1 - fr.curvatures.g2) < 1e-8;
  fr.tau1 = fr.umbilic ? tie_break_tangent(fr.n) : Eigen::Vector3d(V.col(t1));
  fr.tau2 = fr.n.cross(fr.tau1);
  return fr;
}

std::pair<double, double> curvature_transfer(const OffsetCurvatures& oc) {
  const auto transfer = [&](double g) {
    const double den = 1.0 - oc.eta * g;
    if (std::abs(den) < 1e-12) throw std::domain_error("curvature_transfer: 1 - eta g vanishes");
    return g / den;
  };
  return {transfer(oc.g1), transfer(oc.g2)};
}

ThirdDerivatives third_derivatives(const SurfaceHandle& surface, const SurfaceProbe& frame,
                                   const Eigen::Vector3d& zbar, double h) {
  const double zp = surface.distance(zbar);
  if (std::abs(zp) < 1e-4) {
    throw std::domain_error(
        "third_derivatives: probe point too close to the surface (|z'| < 1e-4); probe farther out "
        "along the normal");
  }
  const auto coord = [&](const Eigen::Vector3d& t) {
    return [&, t](const Eigen::Vector3d& x) { return t.dot(surface.closest_point(x) - frame.xstar); };
  };
  const auto X = coord(frame.tau1), Y = coord(frame.tau2);
  const Eigen::Vector3d W1 = fd4_gradient(X, zbar, h), W2 = fd4_gradient(Y, zbar, h);
  const Eigen::Matrix3d W3 = fd4_hessian(X, zbar, h), W4 = fd4_hessian(Y, zbar, h);
  const std::array<Eigen::Vector3d, 2> tau = {frame.tau1, frame.tau2};

  // Jac(a, m) = d h_m / d y'_a
  Eigen::Matrix2d Jac;
  for (int a = 0; a < 2; ++a) {
    Jac(a, 0) = tau[a].dot(W1);
    Jac(a, 1) = tau[a].dot(W2);
  }
  Eigen::Matrix4d V;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) V(2 * a + b, 2 * m + n) = Jac(a, m) * Jac(b, n);
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(V, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ThirdDerivatives out;
  out.condition = svd.singularValues()(0) / svd.singularValues()(3);
  if (!(out.condition <= 1e10)) {
    throw std::runtime_error("third_derivatives: projection Jacobian system is ill-conditioned");
  }
  const std::array<double, 2> kappa = {frame.kappa1, frame.kappa2};
  const std::array<const Eigen::Matrix3d*, 2> W = {&W3, &W4};
  std::array<Eigen::Vector4d, 2> f;  // f[i](2m + n) = f_imn
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector4d rhs;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) rhs(2 * a + b) = tau[a].dot(*W[i] * tau[b]);
    // The local graph has f'' = -kappa, so 1 - z' f''_ii = 1 + z' kappa_i.
    rhs *= (1.0 + zp * kappa[i]) / zp;
    f[i] = svd.solve(rhs);
  }
  const Eigen::Vector3d xxy(f[0](1), f[0](2), f[1](0));
  const Eigen::Vector3d xyy(f[0](3), f[1](1), f[1](2));
  out.f3 << f[0](0), xxy.mean(), xyy.mean(), f[1](3);
  out.asymmetry = std::max(xxy.maxCoeff() - xxy.minCoeff(), xyy.maxCoeff() - xyy.minCoeff());
  return out;
}

double jacobian_J(double eta, double H, double G) {
  const double J = 1.0 + 2.0 * eta * H + eta * eta * G;
  if (!(J > 0)) throw std::domain_error("jacobian_J: non-positive Jacobian (tube exceeds the reach)");
  return J;
}

double jacobian_from_offset(const OffsetCurvatures& oc) {
  return jacobian_J(oc.eta, -0.5 * (oc.g1 + oc.g2), oc.g1 * oc.g2);
}

double jacobian_fd(const SurfaceHandle& surface, const Eigen::Vector3d& y, double h) {
  Eigen::Matrix3d DP;
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    for (int i = 0; i < 4; ++i) s += kFirst[i] * surface.closest_point(y + kSteps[i] * h * unit(a));
    DP.col(a) = s / h;
  }
  const double tr = DP.trace();
  const double J = 0.5 * (tr * tr - (DP * DP).trace());
  if (!(J > 0)) throw std::domain_error("jacobian_fd: non-positive Jacobian (tube exceeds the reach)");
  return J;
}

SurfaceProbe analytic_probe(const SurfaceHandle& surface, const Eigen::Vector3d& xstar) {
  if (!surface.has_distance_jet()) {
    throw std::logic_error("analytic_probe: surface has no closed-form distance");
  }
  SurfaceProbe pr;
  pr.xstar = xstar;
  pr.source = ProbeSource::Analytic;
  Eigen::Vector3d grad;
  for (int a = 0; a < 3; ++a) grad(a) = surface.distance_jet(xstar, unit(a)).derivative(1);
  pr.n = grad.normalized();
  const Eigen::Vector3d t1 = tie_break_tangent(pr.n), t2 = pr.n.cross(t1);
  const auto dir = [&](const Eigen::Vector3d& v, int k) {
    return surface.distance_jet(xstar, v).derivative(k);
  };
  // Tangential Hessian of d by polarization.
  Eigen::Matrix2d H;
  H(0, 0) = dir(t1, 2);
  H(1, 1) = dir(t2, 2);
  H(0, 1) = H(1, 0) = 0.25 * (dir(t1 + t2, 2) - dir(t1 - t2, 2));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
  pr.kappa1 = es.eigenvalues()(1);
  pr.kappa2 = es.eigenvalues()(0);
  pr.umbilic = std::abs(pr.kappa1 - pr.kappa2) < 1e-8;
  pr.tau1 = pr.umbilic ? t1 : Eigen::Vector3d(es.eigenvectors()(0, 1) * t1 + es.eigenvectors()(1, 1) * t2);
  pr.tau1.normalize();
  pr.tau2 = pr.n.cross(pr.tau1);
  // f_abc = -d_abc at a surface point; mixed entries by polarization of cubic forms.
  const double xxx = dir(pr.tau1, 3), yyy = dir(pr.tau2, 3);
  const double sp = dir(pr.tau1 + pr.tau2, 3), sm = dir(pr.tau1 - pr.tau2, 3);
  const double xxy = (sp - sm - 2 * yyy) / 6, xyy = (sp + sm - 2 * xxx) / 6;
  pr.f3 = -Eigen::Vector4d(xxx, xxy, xyy, yyy);
  return pr;
}

SurfaceProbe fd_probe(const SurfaceHandle& surface, const Eigen::Vector3d& xstar, double h,
                      double offset) {
  const auto d = [&](const Eigen::Vector3d& x) { return surface.distance(x); };
  const Eigen::Vector3d n0 = fd4_gradient(d, xstar, h).normalized();
  const Eigen::Vector3d zbar = xstar + offset * n0;
  const OffsetFrame fr = hessian_eigenframe(surface, zbar, h);
  SurfaceProbe pr;
  pr.xstar = xstar;
  pr.source = ProbeSource::GridFD4;
  pr.n = fr.n;
  pr.tau1 = fr.tau1;
  pr.tau2 = fr.tau2;
  pr.umbilic = fr.umbilic;
  std::tie(pr.kappa1, pr.kappa2) = curvature_transfer(fr.curvatures);
  const ThirdDerivatives td = third_derivatives(surface, pr, zbar, h);
  pr.f3 = td.f3;
  pr.f3_asymmetry = td.asymmetry;
  return pr;
}

}  // namespace ctrap
