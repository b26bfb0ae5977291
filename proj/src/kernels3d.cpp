#include "ctrap/kernels3d.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctrap {

namespace {
constexpr double kInv4Pi = 1.0 / (4.0 * std::numbers::pi);
}

const char* to_string(KernelType t) {
  switch (t) {
    case KernelType::SL: return "SL";
    case KernelType::DL: return "DL";
    case KernelType::DLC: return "DLC";
  }
  return "?";
}

KernelType kernel_from_string(const std::string& s) {
  if (s == "SL" || s == "sl") return KernelType::SL;
  if (s == "DL" || s == "dl") return KernelType::DL;
  if (s == "DLC" || s == "dlc") return KernelType::DLC;
  throw std::invalid_argument("unknown kernel '" + s + "' (expected SL, DL or DLC)");
}

double kernel_eval(KernelType type, const Eigen::Vector3d& xstar, const Eigen::Vector3d& nx,
                   const Eigen::Vector3d& p, const Eigen::Vector3d& np) {
  const Eigen::Vector3d r = xstar - p;
  const double len = r.norm();
  if (len < 1e-14) throw std::domain_error("kernel_eval: evaluation at the target point");
  switch (type) {
    case KernelType::SL: return kInv4Pi / len;
    case KernelType::DL: return kInv4Pi * r.dot(np) / (len * len * len);
    case KernelType::DLC: return -kInv4Pi * r.dot(nx) / (len * len * len);
  }
  return 0.0;
}

double kernel_eval(KernelType type, const Eigen::Vector3d& xstar, const Eigen::Vector3d& y,
                   const SurfaceHandle& surface) {
  const Projection py = surface.project(y);
  const Eigen::Vector3d nx = surface.normal(xstar);
  return kernel_eval(type, xstar, nx, py.point, py.normal);
}

Eigen::Vector3i plane_axes(int axis) {
  switch (axis) {
    case 0: return {1, 2, 0};
    case 1: return {2, 0, 1};
    case 2: return {0, 1, 2};
  }
  throw std::out_of_range("plane_axes: axis must be 0, 1 or 2");
}

PrincipalFrame build_frame(const SurfaceProbe& probe, int axis) {
  Eigen::Matrix3d W;
  W << probe.tau1, probe.tau2, probe.n;
  if ((W.transpose() * W - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("build_frame: probe frame is not orthonormal");
  }
  const Eigen::Vector3i ax = plane_axes(axis);
  PrincipalFrame fr;
  fr.tau1 = probe.tau1;
  fr.tau2 = probe.tau2;
  fr.n = probe.n;
  fr.kappa1 = probe.kappa1;
  fr.kappa2 = probe.kappa2;
  fr.axis = axis;
  for (int r = 0; r < 3; ++r) fr.Q.row(r) = W.row(ax(r));
  const Eigen::Matrix3d Qt = fr.Q.transpose();
  fr.A = Qt.topLeftCorner<2, 2>();
  fr.c = Qt.topRightCorner<2, 1>();
  fr.d = Qt.bottomLeftCorner<1, 2>().transpose();
  fr.a33 = Qt(2, 2);
  if (std::abs(fr.A.determinant()) < 1e-12) {
    throw std::domain_error("build_frame: normal is tangent to the slicing planes (det A = 0)");
  }
  return fr;
}

double CubicSurfaceModel::B(const Eigen::Vector2d& y) const {
  const double x = y.x(), w = y.y();
  return 0.5 * (f3(0) * x * x * x / 3 + f3(3) * w * w * w / 3 + f3(1) * x * x * w + f3(2) * x * w * w);
}

Eigen::Vector2d CubicSurfaceModel::C(const Eigen::Vector2d& y) const {
  const double x = y.x(), w = y.y();
  return 0.5 * Eigen::Vector2d(f3(0) * x * x + 2 * f3(1) * x * w + f3(2) * w * w,
                               f3(3) * w * w + 2 * f3(2) * x * w + f3(1) * x * x);
}

CubicSurfaceModel cubic_model(const SurfaceProbe& probe) {
  CubicSurfaceModel m;
  m.M = Eigen::Vector2d(-probe.kappa1, -probe.kappa2).asDiagonal();
  m.f3 = probe.f3;
  return m;
}

KernelExpansion::KernelExpansion(const PrincipalFrame& frame, const CubicSurfaceModel& model,
                                 double eta)
    : frame_(frame), model_(model), eta_(eta) {
  const double kmax = model.M.cwiseAbs().maxCoeff();
  if (std::abs(eta) * kmax >= 1.0) {
    throw std::domain_error("expansion_at_plane: |eta| max|kappa| >= 1 (curvature limit)");
  }
  const Eigen::Matrix2d IM = Eigen::Matrix2d::Identity() - eta * model.M;
  if (std::abs(IM.determinant()) < 1e-12) {
    throw std::domain_error("expansion_at_plane: I - eta M is singular");
  }
  D0_ = IM.inverse();
}

Eigen::Vector2d KernelExpansion::chi0(const Eigen::Vector2d& y) const { return D0_ * frame_.A * y; }

Eigen::Vector2d KernelExpansion::chi1(const Eigen::Vector2d& y) const {
  const Eigen::Vector2d c0 = chi0(y);
  return frame_.d.dot(y) * D0_ * D0_ * model_.M * frame_.A * y + eta_ * D0_ * model_.C(c0);
}

double KernelExpansion::xi0(const Eigen::Vector2d& y) const {
  const Eigen::Matrix2d& A = frame_.A;
  return 0.5 * y.dot(A.transpose() * D0_.transpose() * model_.M * D0_ * A * y);
}

double KernelExpansion::xi1(const Eigen::Vector2d& y) const {
  const Eigen::Matrix2d& A = frame_.A;
  const Eigen::Matrix2d& M = model_.M;
  const Eigen::Vector2d Ay = D0_ * A * y;
  const Eigen::Vector2d DC = D0_ * model_.C(Ay);
  return 0.5 * eta_ * DC.dot(M * D0_ * A * y) + 0.5 * eta_ * Ay.dot(M * DC) + model_.B(Ay) +
         frame_.d.dot(y) *
             y.dot(A.transpose() * M.transpose() * D0_.transpose() * D0_.transpose() * M * D0_ * A * y);
}

double KernelExpansion::xi1_tilde(const Eigen::Vector2d& y) const {
  const Eigen::Matrix2d& A = frame_.A;
  const Eigen::Matrix2d& M = model_.M;
  const Eigen::Vector2d Ay = D0_ * A * y;
  const Eigen::Vector2d Cc = model_.C(Ay);
  const Eigen::Vector2d DC = D0_ * Cc;
  return 0.5 * eta_ * (DC.dot(M * D0_ * A * y) - Ay.dot(M * DC)) - model_.B(Ay) +
         y.dot(A.transpose() * D0_.transpose() * (Eigen::Matrix2d::Identity() + eta_ * M * D0_) * Cc) +
         frame_.d.dot(y) * y.dot(A.transpose() * D0_ * M * D0_ * D0_ * M * A * y);
}

double KernelExpansion::psi0(const Eigen::Vector2d& y) const { return chi0(y).norm(); }

double KernelExpansion::psi1(const Eigen::Vector2d& y) const {
  const Eigen::Vector2d c0 = chi0(y);
  return c0.dot(chi1(y)) / c0.norm();
}

double KernelExpansion::phi0(KernelType type, const Eigen::Vector2d& yhat) const {
  const double p0 = psi0(yhat);
  if (type == KernelType::SL) return kInv4Pi / p0;
  return kInv4Pi * xi0(yhat) / (p0 * p0 * p0);
}

double KernelExpansion::phi1(KernelType type, const Eigen::Vector2d& yhat) const {
  const double p0 = psi0(yhat), p1 = psi1(yhat);
  if (type == KernelType::SL) return -kInv4Pi * p1 / (p0 * p0);
  const double x1 = type == KernelType::DLC ? xi1(yhat) : xi1_tilde(yhat);
  const double p3 = p0 * p0 * p0;
  return kInv4Pi * (-3.0 * xi0(yhat) * p1 / (p3 * p0) + x1 / p3);
}

double KernelExpansion::s0(KernelType type, const Eigen::Vector2d& y) const {
  const double r = y.norm();
  return phi0(type, y / r) / r;
}

double KernelExpansion::s1(KernelType type, const Eigen::Vector2d& y) const {
  return phi1(type, y / y.norm());
}

SingularTerm KernelExpansion::term0(KernelType type, int samples) const {
  return make_singular_term(
      0, [self = *this, type](double psi) { return self.phi0(type, {std::cos(psi), std::sin(psi)}); },
      samples);
}

SingularTerm KernelExpansion::term1(KernelType type, int samples) const {
  return make_singular_term(
      1, [self = *this, type](double psi) { return self.phi1(type, {std::cos(psi), std::sin(psi)}); },
      samples);
}

KernelExpansion expansion_at_plane(const PrincipalFrame& frame, const CubicSurfaceModel& model,
                                   double eta) {
  return KernelExpansion(frame, model, eta);
}

Lemma33Report lemma33_checks(const SurfaceHandle& surface, const SurfaceProbe& probe,
                             const CubicSurfaceModel& model, double zprime, double radius,
                             int directions, double fd_step) {
  const auto hmap = [&](const Eigen::Vector2d& yp) {
    const Eigen::Vector3d x = probe.xstar + yp.x() * probe.tau1 + yp.y() * probe.tau2 + zprime * probe.n;
    const Eigen::Vector3d p = surface.closest_point(x) - probe.xstar;
    return Eigen::Vector2d(probe.tau1.dot(p), probe.tau2.dot(p));
  };
  const Eigen::Matrix2d D = (Eigen::Matrix2d::Identity() - zprime * model.M).inverse();
  Lemma33Report rep;
  rep.radius = radius;
  rep.h_at_origin = hmap(Eigen::Vector2d::Zero()).norm();
  Eigen::Matrix2d J;
  for (int a = 0; a < 2; ++a) {
    const Eigen::Vector2d e = fd_step * Eigen::Vector2d::Unit(a);
    J.col(a) = (-hmap(2 * e) + 8 * hmap(e) - 8 * hmap(-e) + hmap(-2 * e)) / (12 * fd_step);
  }
  rep.jacobian_residual = (J - D).cwiseAbs().maxCoeff();
  for (int i = 0; i < directions; ++i) {
    const double t = 2 * std::numbers::pi * i / directions;
    const Eigen::Vector2d yp = radius * Eigen::Vector2d(std::cos(t), std::sin(t));
    const Eigen::Vector2d Dy = D * yp;
    const Eigen::Vector2d model_h = Dy + zprime * D * model.C(Dy);
    rep.quadratic_residual = std::max(rep.quadratic_residual, (hmap(yp) - model_h).norm());
  }
  return rep;
}

}  // namespace ctrap
