#pragma once

#include "ctrap/jet.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

namespace ctrap {

/// Closest-point data of a point in the tube: signed distance (negative inside), the projected
/// point on the surface and the outward unit normal there.
struct Projection {
  double distance = 0.0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
};

struct AxisBox {
  Eigen::Vector3d lo = Eigen::Vector3d::Zero();
  Eigen::Vector3d hi = Eigen::Vector3d::Zero();
};

/// Closed surface known through its signed distance and closest-point mapping.
class SurfaceHandle {
public:
  virtual ~SurfaceHandle() = default;

  virtual Projection project(const Eigen::Vector3d& y) const = 0;
  virtual double distance(const Eigen::Vector3d& y) const { return project(y).distance; }
  Eigen::Vector3d closest_point(const Eigen::Vector3d& y) const { return project(y).point; }
  Eigen::Vector3d normal(const Eigen::Vector3d& y) const { return project(y).normal; }

  virtual double reach() const = 0;
  /// Box containing the surface.
  virtual AxisBox bounds() const = 0;

  /// Taylor jet of t -> d(x + t v) when the distance has a closed form.
  virtual bool has_distance_jet() const { return false; }
  virtual Jet3 distance_jet(const Eigen::Vector3d& x, const Eigen::Vector3d& v) const;
};

/// Surface density, evaluated at points of the surface.
using Density = std::function<double(const Eigen::Vector3d&)>;

class Sphere : public SurfaceHandle {
public:
  Sphere(Eigen::Vector3d center, double radius);

  Projection project(const Eigen::Vector3d& y) const override;
  double distance(const Eigen::Vector3d& y) const override;
  double reach() const override { return radius_; }
  AxisBox bounds() const override;
  bool has_distance_jet() const override { return true; }
  Jet3 distance_jet(const Eigen::Vector3d& x, const Eigen::Vector3d& v) const override;

  const Eigen::Vector3d& center() const { return center_; }
  double radius() const { return radius_; }

private:
  Eigen::Vector3d center_;
  double radius_;
};

/// rho(theta, phi) = c0 + c1 sin(theta) + c2 cos(phi) sin(theta) + c3 sin(phi) cos(theta).
struct TorusDensityCoefficients {
  double c0 = 1.38;
  double c1 = 2.196;
  double c2 = -0.29837;
  double c3 = 1.128;
};

/// Torus Q * ((R2 cos t + R1) cos p, (R2 cos t + R1) sin p, R2 sin t) + C with Q = Qz(c) Qy(b) Qx(a).
struct TorusSpec {
  double R1 = 0.7;
  double R2 = 0.2;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  Eigen::Vector3d C = Eigen::Vector3d::Zero();
  TorusDensityCoefficients density;

  Eigen::Matrix3d rotation() const;
};

/// Fixture file holding the test torus pose, radii and density.
TorusSpec load_torus_fixture(const std::filesystem::path& file);
/// Fixture shipped with the sources.
std::filesystem::path default_torus_fixture();

class Torus : public SurfaceHandle {
public:
  explicit Torus(const TorusSpec& spec);

  Projection project(const Eigen::Vector3d& y) const override;
  double distance(const Eigen::Vector3d& y) const override;
  double reach() const override { return spec_.R2; }
  AxisBox bounds() const override;
  bool has_distance_jet() const override { return true; }
  Jet3 distance_jet(const Eigen::Vector3d& x, const Eigen::Vector3d& v) const override;

  /// Surface point at parameters (theta, phi).
  Eigen::Vector3d point(double theta, double phi) const;
  /// Parameters of a point, by atan2 in the untilted frame: theta, phi in (-pi, pi].
  Eigen::Vector2d parameters(const Eigen::Vector3d& p) const;
  /// |T_theta x T_phi| = R2 (R1 + R2 cos theta).
  double area_element(double theta) const;
  Eigen::Vector3d outward_normal(double theta, double phi) const;

  double density(double theta, double phi) const;
  double density(const Eigen::Vector3d& p) const;
  Density density_function() const;

  const TorusSpec& spec() const { return spec_; }
  const Eigen::Matrix3d& rotation() const { return Q_; }

private:
  template <class T>
  T local_distance(const T& x, const T& y, const T& z) const {
    using std::sqrt;
    const T rho = sqrt(x * x + y * y);
    const T dr = rho - T(spec_.R1);
    return sqrt(dr * dr + z * z) - T(spec_.R2);
  }

  TorusSpec spec_;
  Eigen::Matrix3d Q_;
};

/// Density of the fixture torus as a free function of the parameters.
double torus_density(const TorusDensityCoefficients& c, double theta, double phi);

/// Graph z = q(x, y) of a cubic with q(0) = 0 and grad q(0) = 0, normal pointing to +z.
/// Closest points by Newton iteration; meant for small neighborhoods of the origin.
class CubicGraph : public SurfaceHandle {
public:
  /// q = (qxx x^2 + 2 qxy x y + qyy y^2) / 2 + (qxxx x^3 + 3 qxxy x^2 y + 3 qxyy x y^2 + qyyy y^3) / 6
  CubicGraph(double qxx, double qxy, double qyy, double qxxx, double qxxy, double qxyy, double qyyy);

  Projection project(const Eigen::Vector3d& y) const override;
  double reach() const override;
  AxisBox bounds() const override;

  double q(double x, double y) const;
  Eigen::Vector2d grad(double x, double y) const;
  Eigen::Matrix2d hessian(double x, double y) const;
  Eigen::Matrix2d hessian0() const;
  /// Third derivatives (qxxx, qxxy, qxyy, qyyy).
  Eigen::Vector4d third() const;

private:
  double qxx_, qxy_, qyy_, qxxx_, qxxy_, qxyy_, qyyy_;
};

}  // namespace ctrap
