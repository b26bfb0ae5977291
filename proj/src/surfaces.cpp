#include "ctrap/surfaces.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <stdexcept>

#ifndef CTRAP_DATA_DIR
#define CTRAP_DATA_DIR "data"
#endif

namespace ctrap {

Jet3 SurfaceHandle::distance_jet(const Eigen::Vector3d&, const Eigen::Vector3d&) const {
  throw std::logic_error("distance_jet: surface has no closed-form distance");
}

// ---------------------------------------------------------------------------------------------
// Sphere

Sphere::Sphere(Eigen::Vector3d center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0)) throw std::invalid_argument("Sphere: radius must be positive");
}

double Sphere::distance(const Eigen::Vector3d& y) const { return (y - center_).norm() - radius_; }

Projection Sphere::project(const Eigen::Vector3d& y) const {
  const Eigen::Vector3d r = y - center_;
  const double len = r.norm();
  if (len < 1e-12) throw std::domain_error("Sphere::project: center has no unique closest point");
  Projection pr;
  pr.normal = r / len;
  pr.point = center_ + radius_ * pr.normal;
  pr.distance = len - radius_;
  return pr;
}

AxisBox Sphere::bounds() const {
  const Eigen::Vector3d e = Eigen::Vector3d::Constant(radius_);
  return {center_ - e, center_ + e};
}

Jet3 Sphere::distance_jet(const Eigen::Vector3d& x, const Eigen::Vector3d& v) const {
  Jet3 s2(0.0);
  for (int i = 0; i < 3; ++i) {
    const Jet3 t = Jet3::variable(x(i) - center_(i), v(i));
    s2 = s2 + t * t;
  }
  return sqrt(s2) - Jet3(radius_);
}

// ---------------------------------------------------------------------------------------------
// Torus

Eigen::Matrix3d TorusSpec::rotation() const {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  return (AngleAxisd(c, Vector3d::UnitZ()) * AngleAxisd(b, Vector3d::UnitY()) *
          AngleAxisd(a, Vector3d::UnitX()))
      .toRotationMatrix();
}

double torus_density(const TorusDensityCoefficients& c, double theta, double phi) {
  return c.c0 + c.c1 * std::sin(theta) + c.c2 * std::cos(phi) * std::sin(theta) +
         c.c3 * std::sin(phi) * std::cos(theta);
}

TorusSpec load_torus_fixture(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open torus fixture " + file.string());
  nlohmann::json j;
  in >> j;
  if (j.value("format_version", 0) != 1) {
    throw std::runtime_error("torus fixture " + file.string() + ": unsupported format_version");
  }
  TorusSpec s;
  s.R1 = j.at("R1").get<double>();
  s.R2 = j.at("R2").get<double>();
  s.a = j.at("rotation").at("a").get<double>();
  s.b = j.at("rotation").at("b").get<double>();
  s.c = j.at("rotation").at("c").get<double>();
  const auto C = j.at("translation").get<std::vector<double>>();
  if (C.size() != 3) throw std::runtime_error("torus fixture: translation needs 3 entries");
  s.C = Eigen::Vector3d(C[0], C[1], C[2]);
  const auto& d = j.at("density");
  s.density = {d.at("c0").get<double>(), d.at("c1").get<double>(), d.at("c2").get<double>(),
               d.at("c3").get<double>()};
  if (!(s.R2 > 0 && s.R2 < s.R1)) throw std::runtime_error("torus fixture: need 0 < R2 < R1");
  return s;
}

std::filesystem::path default_torus_fixture() {
  return std::filesystem::path(CTRAP_DATA_DIR) / "torus_fixture.json";
}

Torus::Torus(const TorusSpec& spec) : spec_(spec), Q_(spec.rotation()) {
  if (!(spec.R2 > 0 && spec.R2 < spec.R1)) throw std::invalid_argument("Torus: need 0 < R2 < R1");
}

double Torus::distance(const Eigen::Vector3d& y) const {
  const Eigen::Vector3d l = Q_.transpose() * (y - spec_.C);
  return local_distance(l.x(), l.y(), l.z());
}

Projection Torus::project(const Eigen::Vector3d& y) const {
  const Eigen::Vector3d l = Q_.transpose() * (y - spec_.C);
  const double rho = std::hypot(l.x(), l.y());
  if (rho < 1e-12) throw std::domain_error("Torus::project: point on the symmetry axis");
  const Eigen::Vector3d center(spec_.R1 * l.x() / rho, spec_.R1 * l.y() / rho, 0.0);
  const Eigen::Vector3d r = l - center;
  const double len = r.norm();
  if (len < 1e-12) throw std::domain_error("Torus::project: point on the tube center circle");
  Projection pr;
  const Eigen::Vector3d n = r / len;
  pr.normal = Q_ * n;
  pr.point = Q_ * (center + spec_.R2 * n) + spec_.C;
  pr.distance = len - spec_.R2;
  return pr;
}

AxisBox Torus::bounds() const {
  // Support function of the torus along each axis: R1 |P e| + R2 for the in-plane part.
  AxisBox box;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d e = Q_.row(i).transpose();  // axis i in the local frame
    const double half = spec_.R1 * std::hypot(e.x(), e.y()) + spec_.R2;
    box.lo(i) = spec_.C(i) - half;
    box.hi(i) = spec_.C(i) + half;
  }
  return box;
}

Jet3 Torus::distance_jet(const Eigen::Vector3d& x, const Eigen::Vector3d& v) const {
  const Eigen::Vector3d lx = Q_.transpose() * (x - spec_.C);
  const Eigen::Vector3d lv = Q_.transpose() * v;
  return local_distance(Jet3::variable(lx.x(), lv.x()), Jet3::variable(lx.y(), lv.y()),
                        Jet3::variable(lx.z(), lv.z()));
}

Eigen::Vector3d Torus::point(double theta, double phi) const {
  const double w = spec_.R2 * std::cos(theta) + spec_.R1;
  return Q_ * Eigen::Vector3d(w * std::cos(phi), w * std::sin(phi), spec_.R2 * std::sin(theta)) +
         spec_.C;
}

Eigen::Vector2d Torus::parameters(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d l = Q_.transpose() * (p - spec_.C);
  const double rho = std::hypot(l.x(), l.y());
  return {std::atan2(l.z(), rho - spec_.R1), std::atan2(l.y(), l.x())};
}

double Torus::area_element(double theta) const {
  return spec_.R2 * (spec_.R1 + spec_.R2 * std::cos(theta));
}

Eigen::Vector3d Torus::outward_normal(double theta, double phi) const {
  return Q_ * Eigen::Vector3d(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                              std::sin(theta));
}

double Torus::density(double theta, double phi) const {
  return torus_density(spec_.density, theta, phi);
}

double Torus::density(const Eigen::Vector3d& p) const {
  const Eigen::Vector2d tp = parameters(p);
  return density(tp(0), tp(1));
}

Density Torus::density_function() const {
  return [this](const Eigen::Vector3d& p) { return density(p); };
}

// ---------------------------------------------------------------------------------------------
// Cubic graph

CubicGraph::CubicGraph(double qxx, double qxy, double qyy, double qxxx, double qxxy, double qxyy,
                       double qyyy)
    : qxx_(qxx), qxy_(qxy), qyy_(qyy), qxxx_(qxxx), qxxy_(qxxy), qxyy_(qxyy), qyyy_(qyyy) {}

double CubicGraph::q(double x, double y) const {
  return 0.5 * (qxx_ * x * x + 2 * qxy_ * x * y + qyy_ * y * y) +
         (qxxx_ * x * x * x + 3 * qxxy_ * x * x * y + 3 * qxyy_ * x * y * y + qyyy_ * y * y * y) / 6;
}

Eigen::Vector2d CubicGraph::grad(double x, double y) const {
  return {qxx_ * x + qxy_ * y + 0.5 * (qxxx_ * x * x + 2 * qxxy_ * x * y + qxyy_ * y * y),
          qxy_ * x + qyy_ * y + 0.5 * (qxxy_ * x * x + 2 * qxyy_ * x * y + qyyy_ * y * y)};
}

Eigen::Matrix2d CubicGraph::hessian(double x, double y) const {
  Eigen::Matrix2d H;
  H(0, 0) = qxx_ + qxxx_ * x + qxxy_ * y;
  H(0, 1) = H(1, 0) = qxy_ + qxxy_ * x + qxyy_ * y;
  H(1, 1) = qyy_ + qxyy_ * x + qyyy_ * y;
  return H;
}

Eigen::Matrix2d CubicGraph::hessian0() const { return hessian(0, 0); }

Eigen::Vector4d CubicGraph::third() const { return {qxxx_, qxxy_, qxyy_, qyyy_}; }

double CubicGraph::reach() const {
  const double k = hessian0().cwiseAbs().maxCoeff() + Eigen::Vector4d(third()).cwiseAbs().maxCoeff();
  return k > 0 ? 0.5 / k : 1.0;
}

AxisBox CubicGraph::bounds() const {
  return {Eigen::Vector3d::Constant(-1.0), Eigen::Vector3d::Constant(1.0)};
}

Projection CubicGraph::project(const Eigen::Vector3d& p) const {
  // Stationarity of |(u, q(u)) - p|^2: (u - p_xy) + (q(u) - p_z) grad q(u) = 0.
  Eigen::Vector2d u(p.x(), p.y());
  for (int it = 0; it < 50; ++it) {
    const Eigen::Vector2d g = grad(u.x(), u.y());
    const double r = q(u.x(), u.y()) - p.z();
    const Eigen::Vector2d F = (u - p.head<2>()) + r * g;
    const Eigen::Matrix2d J =
        Eigen::Matrix2d::Identity() + g * g.transpose() + r * hessian(u.x(), u.y());
    const Eigen::Vector2d du = J.lu().solve(F);
    u -= du;
    if (du.norm() < 1e-16 * (1 + u.norm())) break;
  }
  const Eigen::Vector2d g = grad(u.x(), u.y());
  Projection pr;
  pr.point = Eigen::Vector3d(u.x(), u.y(), q(u.x(), u.y()));
  pr.normal = Eigen::Vector3d(-g.x(), -g.y(), 1.0).normalized();
  pr.distance = (p - pr.point).dot(pr.normal);
  return pr;
}

}  // namespace ctrap
