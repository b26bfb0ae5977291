#pragma once

#include "ctrap/surfaces.hpp"

#include <Eigen/Core>

#include <functional>
#include <utility>

namespace ctrap {

// Curvature convention: a sphere of radius R with outward normal has kappa = g = 1/R (the
// eigenvalues of the Hessian of d_Gamma). The local graph f over the tangent plane, with its
// height measured along the outward normal, then has f'' = -diag(kappa1, kappa2).

enum class ProbeSource { Analytic, GridFD4 };

/// Local geometry at a surface point: right-handed principal frame (tau1 x tau2 = n),
/// principal curvatures and the third derivatives (f_xxx, f_xxy, f_xyy, f_yyy) of the local graph.
struct SurfaceProbe {
  Eigen::Vector3d xstar = Eigen::Vector3d::Zero();
  Eigen::Vector3d tau1 = Eigen::Vector3d::UnitX();
  Eigen::Vector3d tau2 = Eigen::Vector3d::UnitY();
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  Eigen::Vector4d f3 = Eigen::Vector4d::Zero();
  ProbeSource source = ProbeSource::Analytic;
  bool umbilic = false;
  /// Largest spread between the duplicated mixed third derivatives (FD probes only).
  double f3_asymmetry = 0.0;
};

/// Curvatures of the level set Gamma_eta at a tube point.
struct OffsetCurvatures {
  double g1 = 0.0;
  double g2 = 0.0;
  double eta = 0.0;
};

/// Principal frame and level-set curvatures at a tube point, from the Hessian of d_Gamma.
struct OffsetFrame {
  OffsetCurvatures curvatures;
  Eigen::Vector3d tau1, tau2, n;
  bool umbilic = false;
};

/// Fourth-order central differences on a 5-point line / 5x5 plane stencil.
Eigen::Vector3d fd4_gradient(const std::function<double(const Eigen::Vector3d&)>& f,
                             const Eigen::Vector3d& z, double h);
Eigen::Matrix3d fd4_hessian(const std::function<double(const Eigen::Vector3d&)>& f,
                            const Eigen::Vector3d& z, double h);

/// Eigenframe of the FD4 Hessian of d_Gamma at zbar. n follows grad d_Gamma; g1 >= g2.
/// When |g1 - g2| < 1e-8, tau1 is taken along the tangential projection of e_x (else e_y).
OffsetFrame hessian_eigenframe(const SurfaceHandle& surface, const Eigen::Vector3d& zbar, double h);

/// kappa_i = g_i / (1 - eta g_i): curvatures of Gamma from those of Gamma_eta.
std::pair<double, double> curvature_transfer(const OffsetCurvatures& oc);

/// Third derivatives of the local graph from FD4 derivatives of the closest-point mapping at
/// zbar = xstar + eta n, through the two 4x4 linear systems of the projection map.
/// Returns (f_xxx, f_xxy, f_xyy, f_yyy) with the duplicated mixed entries averaged.
struct ThirdDerivatives {
  Eigen::Vector4d f3 = Eigen::Vector4d::Zero();
  double asymmetry = 0.0;
  double condition = 0.0;
};
ThirdDerivatives third_derivatives(const SurfaceHandle& surface, const SurfaceProbe& frame,
                                   const Eigen::Vector3d& zbar, double h);

/// 1 + 2 eta H + eta^2 G. With H = -(g1 + g2)/2 and G = g1 g2 taken at the tube point this is
/// (1 - eta g1)(1 - eta g2) = dsigma_Gamma / dsigma_Gamma_eta.
double jacobian_J(double eta, double H, double G);
double jacobian_from_offset(const OffsetCurvatures& oc);
/// Same Jacobian as the sum of the principal 2x2 minors of the FD4 derivative of P_Gamma.
double jacobian_fd(const SurfaceHandle& surface, const Eigen::Vector3d& y, double h);

/// Exact probe from the closed-form distance (Taylor jets along tangent directions).
SurfaceProbe analytic_probe(const SurfaceHandle& surface, const Eigen::Vector3d& xstar);

/// Probe from FD4 differences of d_Gamma and P_Gamma with spacing h, taken at
/// zbar = xstar + offset n (offset must be nonzero and inside the tube).
SurfaceProbe fd_probe(const SurfaceHandle& surface, const Eigen::Vector3d& xstar, double h,
                      double offset);

}  // namespace ctrap
