#include "doctest.h"

#include "ctrap/surfaces.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ctrap;

namespace {

Eigen::Vector3d random_tube_point(const SurfaceHandle& s, std::mt19937_64& rng, double width) {
  const AxisBox b = s.bounds();
  std::uniform_real_distribution<double> u(0, 1);
  for (;;) {
    Eigen::Vector3d p;
    for (int i = 0; i < 3; ++i) p(i) = b.lo(i) + u(rng) * (b.hi(i) - b.lo(i));
    if (std::abs(s.distance(p)) < width) return p;
  }
}

}  // namespace

TEST_SUITE("surfaces") {

TEST_CASE("untilted torus distance and projection") {
  TorusSpec spec;
  const Torus t(spec);
  const Projection pr = t.project(Eigen::Vector3d(0.7 + 0.2 + 0.05, 0, 0));
  CHECK(pr.distance == doctest::Approx(0.05).epsilon(1e-14));
  CHECK((pr.point - Eigen::Vector3d(0.9, 0, 0)).norm() < 1e-14);
  CHECK((pr.normal - Eigen::Vector3d(1, 0, 0)).norm() < 1e-14);
  // Distance R2 + t from the tube center circle.
  const double th = 0.7, ph = -1.1, off = 0.031;
  const Eigen::Vector3d c(0.7 * std::cos(ph), 0.7 * std::sin(ph), 0);
  const Eigen::Vector3d dir(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), std::sin(th));
  CHECK(t.distance(c + (0.2 + off) * dir) == doctest::Approx(off).epsilon(1e-12));
  CHECK(t.distance(c + (0.2 - off) * dir) == doctest::Approx(-off).epsilon(1e-12));
  CHECK_THROWS_AS(t.project(Eigen::Vector3d(0, 0, 0.3)), std::domain_error);
  CHECK_THROWS_AS(t.project(c), std::domain_error);
}

TEST_CASE("fixture torus: pose, idempotent projection and unit distance gradient") {
  const Torus t(load_torus_fixture(default_torus_fixture()));
  const Eigen::Matrix3d Q = t.rotation();
  CHECK((Q.transpose() * Q - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(t.spec().R1 == 0.7);
  CHECK(t.spec().R2 == 0.2);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d y = random_tube_point(t, rng, 0.1);
    const Projection p1 = t.project(y);
    const Projection p2 = t.project(p1.point);
    CHECK((p2.point - p1.point).norm() < 1e-12);
    CHECK(std::abs(p2.distance) < 1e-12);
    CHECK((y - p1.point - p1.distance * p1.normal).norm() < 1e-12);
    const double d = 1e-5;
    Eigen::Vector3d grad;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d e = Eigen::Vector3d::Unit(k) * d;
      grad(k) = (t.distance(y + e) - t.distance(y - e)) / (2 * d);
    }
    CHECK(std::abs(grad.norm() - 1) < 1e-6);
    CHECK((grad - p1.normal).norm() < 1e-6);
  }
}

TEST_CASE("torus parametrization round trip") {
  const Torus t(load_torus_fixture(default_torus_fixture()));
  for (double th : {-2.5, -0.3, 0.0, 1.2, 3.0}) {
    for (double ph : {-3.0, -1.0, 0.4, 2.2}) {
      const Eigen::Vector3d p = t.point(th, ph);
      CHECK(std::abs(t.distance(p)) < 1e-13);
      const Eigen::Vector2d tp = t.parameters(p);
      CHECK(tp(0) == doctest::Approx(th).epsilon(1e-12));
      CHECK(tp(1) == doctest::Approx(ph).epsilon(1e-12));
      CHECK((t.outward_normal(th, ph) - t.project(p + 0.01 * t.outward_normal(th, ph)).normal).norm() <
            1e-12);
      CHECK(t.density(p) == doctest::Approx(t.density(th, ph)).epsilon(1e-12));
    }
  }
  CHECK(t.area_element(0.0) == doctest::Approx(0.2 * 0.9));
}

TEST_CASE("torus density values") {
  const TorusDensityCoefficients c;
  CHECK(torus_density(c, 0.0, 0.0) == doctest::Approx(1.38).epsilon(1e-15));
  CHECK(torus_density(c, std::numbers::pi / 2, 0.0) == doctest::Approx(3.27763).epsilon(1e-14));
  CHECK(torus_density(c, 0.4 + 2 * std::numbers::pi, -1.3) ==
        doctest::Approx(torus_density(c, 0.4, -1.3)).epsilon(1e-14));
}

TEST_CASE("sphere handle") {
  const Eigen::Vector3d c(0.1, -0.2, 0.3);
  const double R = 0.8;
  const Sphere s(c, R);
  const Eigen::Vector3d e = Eigen::Vector3d(1, 2, -2).normalized();
  CHECK(s.distance(c + 2 * R * e) == doctest::Approx(R).epsilon(1e-15));
  const Projection p = s.project(c + 0.9 * e);
  CHECK((s.project(p.point).point - p.point).norm() < 1e-15);
  CHECK((p.normal - e).norm() < 1e-15);
  CHECK_THROWS_AS(s.project(c), std::domain_error);
  CHECK_THROWS_AS(Sphere(c, 0.0), std::invalid_argument);
}

TEST_CASE("cubic graph projection") {
  const CubicGraph g(-0.8, 0.1, 0.6, 0.3, -0.2, 0.5, 0.1);
  const Eigen::Vector2d xy(0.03, -0.02);
  const Eigen::Vector3d on(xy.x(), xy.y(), g.q(xy.x(), xy.y()));
  const Projection p = g.project(on);
  CHECK(std::abs(p.distance) < 1e-13);
  const Eigen::Vector3d n = Eigen::Vector3d(-g.grad(xy.x(), xy.y()).x(), -g.grad(xy.x(), xy.y()).y(), 1)
                                .normalized();
  const Projection q = g.project(on + 0.02 * n);
  CHECK(q.distance == doctest::Approx(0.02).epsilon(1e-10));
  CHECK((q.point - on).norm() < 1e-10);
}

}  // TEST_SUITE
