#pragma once

#include "ctrap/geometry.hpp"
#include "ctrap/singular_term.hpp"
#include "ctrap/surfaces.hpp"

#include <Eigen/Core>

#include <string>

namespace ctrap {

enum class KernelType { SL, DL, DLC };

const char* to_string(KernelType t);
KernelType kernel_from_string(const std::string& s);

/// G0, dG0/dn_y or dG0/dn_x at (xstar, p) for a surface point p with normal np; nx is the normal
/// at xstar. Throws when |p - xstar| < 1e-14.
double kernel_eval(KernelType type, const Eigen::Vector3d& xstar, const Eigen::Vector3d& nx,
                   const Eigen::Vector3d& p, const Eigen::Vector3d& np);
/// Same, at p = P_Gamma(y), with both normals taken from the surface handle.
double kernel_eval(KernelType type, const Eigen::Vector3d& xstar, const Eigen::Vector3d& y,
                   const SurfaceHandle& surface);

/// Cyclic axis order (i, j, k) with k the slicing axis: plane coordinates are (x_i, x_j).
Eigen::Vector3i plane_axes(int axis);

/// Principal basis written in the coordinates ordered by plane_axes(axis), with
/// Q^T = [A c; d^T a33].
struct PrincipalFrame {
  Eigen::Vector3d tau1, tau2, n;  // world coordinates
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  int axis = 2;
  Eigen::Matrix3d Q;  // columns tau1, tau2, n in plane-ordered coordinates
  Eigen::Matrix2d A;
  Eigen::Vector2d d;
  Eigen::Vector2d c;
  double a33 = 0.0;
};

PrincipalFrame build_frame(const SurfaceProbe& probe, int axis);

/// Cubic model of the local graph: f = y^T M y / 2 + B(y) with M = f''(0) and the
/// third derivatives f3 = (f_xxx, f_xxy, f_xyy, f_yyy).
struct CubicSurfaceModel {
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  Eigen::Vector4d f3 = Eigen::Vector4d::Zero();

  double B(const Eigen::Vector2d& y) const;
  Eigen::Vector2d C(const Eigen::Vector2d& y) const;
};

/// M = -diag(kappa1, kappa2) for the outward graph; f3 carried over.
CubicSurfaceModel cubic_model(const SurfaceProbe& probe);

/// Expansion s = s0 + s1 + O(|y|) of a layer kernel on the plane whose singular point sits at
/// signed distance eta from the surface. All functions take a unit vector yhat in plane coordinates.
class KernelExpansion {
public:
  KernelExpansion(const PrincipalFrame& frame, const CubicSurfaceModel& model, double eta);

  double eta() const { return eta_; }
  const Eigen::Matrix2d& D0() const { return D0_; }

  Eigen::Vector2d chi0(const Eigen::Vector2d& y) const;
  Eigen::Vector2d chi1(const Eigen::Vector2d& y) const;
  double xi0(const Eigen::Vector2d& y) const;
  double xi1(const Eigen::Vector2d& y) const;
  double xi1_tilde(const Eigen::Vector2d& y) const;
  double psi0(const Eigen::Vector2d& y) const;
  double psi1(const Eigen::Vector2d& y) const;

  /// Angular profiles: s0 = phi0(yhat)/|y|, s1 = phi1(yhat), including the 1/(4 pi).
  double phi0(KernelType type, const Eigen::Vector2d& yhat) const;
  double phi1(KernelType type, const Eigen::Vector2d& yhat) const;
  double s0(KernelType type, const Eigen::Vector2d& y) const;
  double s1(KernelType type, const Eigen::Vector2d& y) const;

  /// s0 (k = 0) and s1 (k = 1) as sampled singular terms.
  SingularTerm term0(KernelType type, int samples = 4096) const;
  SingularTerm term1(KernelType type, int samples = 4096) const;

private:
  PrincipalFrame frame_;
  CubicSurfaceModel model_;
  double eta_;
  Eigen::Matrix2d D0_;
};

/// Throws when I - eta M is singular or |eta| max|kappa| >= 1.
KernelExpansion expansion_at_plane(const PrincipalFrame& frame, const CubicSurfaceModel& model,
                                   double eta);

/// Checks of the projection map h(y', z') in the principal frame against
/// h(0, z') = 0, dh/dy'(0, z') = D(z') and the quadratic term z' D C(D y', D y').
struct Lemma33Report {
  double h_at_origin = 0.0;        // |h(0, z')|
  double jacobian_residual = 0.0;  // max entry of FD4 dh/dy' - (I - z' M)^-1
  double quadratic_residual = 0.0; // max over directions of |h - D y' - z' D C(D y', D y')|
  double radius = 0.0;
};
Lemma33Report lemma33_checks(const SurfaceHandle& surface, const SurfaceProbe& probe,
                             const CubicSurfaceModel& model, double zprime, double radius = 1e-3,
                             int directions = 8, double fd_step = 1e-3);

}  // namespace ctrap
