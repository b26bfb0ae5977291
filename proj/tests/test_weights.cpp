#include "doctest.h"

#include "ctrap/quadrature.hpp"
#include "ctrap/study.hpp"
#include "ctrap/weights.hpp"

#include "moment_oracle.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace ctrap;

namespace {

// Punctured lattice sum plus correction for s_k g_j, where s_k has the given angular mode.
double replay(int k, int p, int mode, int test, GridOffset off, double h, const WeightMatrix& W,
              const BumpFunction& bump) {
  const Stencil& st = stencil_for_order(p);
  const Monomial& mono = st.monomials[test];
  auto g = [&](double x, double y) {
    return bump(std::hypot(x, y)) * std::pow(x, mono.a) * std::pow(y, mono.b);
  };
  const int reach = int(std::ceil(bump.support_radius / h)) + 2;
  long double sum = 0;
  for (int i = -reach; i <= reach; ++i) {
    for (int j = -reach; j <= reach; ++j) {
      bool skip = false;
      for (const auto& o : st.offsets) skip = skip || (o.x() == i && o.y() == j);
      const double x = h * (i - off.alpha), y = h * (j - off.beta);
      if (skip || std::hypot(x, y) >= bump.support_radius) continue;
      sum += std::pow(std::hypot(x, y), k - 1) * testing::angular_basis(mode, std::atan2(y, x)) *
             g(x, y);
    }
  }
  long double corr = 0;
  for (int i = 0; i < st.size(); ++i) {
    corr += W(i, mode) * g(h * (st.offsets[i].x() - off.alpha), h * (st.offsets[i].y() - off.beta));
  }
  return double(h * h * sum + std::pow(h, k + 1) * corr);
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("bump plateau, support edge and smooth blend") {
  const BumpFunction b;
  CHECK(bump_eval(0.0, b) == 1.0);
  CHECK(bump_eval(b.support_radius, b) == 0.0);
  const double mid = bump_eval(0.5 * (b.plateau_radius + b.support_radius), b);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK_THROWS_AS(bump_eval(-0.1, b), std::invalid_argument);
  // One-sided slopes match (both zero) at the plateau edge and the support edge.
  const double d = 1e-4;
  for (double r : {b.plateau_radius, b.support_radius}) {
    const double left = (b(r) - b(r - d)) / d, right = (b(r + d) - b(r)) / d;
    CHECK(std::abs(left - right) < 1e-6);
  }
  double prev = 1.0;
  for (double r = 0.0; r <= 1.0; r += 0.01) {
    CHECK(b(r) <= prev);
    prev = b(r);
  }
}

TEST_CASE("singular moments against the polar oracle") {
  const WeightOptions opt;
  const MomentCache<long double> cache(opt, 8, 3, 4);
  const BumpFunction& b = opt.bump;
  const double radial0 = testing::polar_moment(0, 0, {0, 0}, b);
  CHECK(double(cache.moment(0, {0, 0}, 0)) == doctest::Approx(radial0).epsilon(1e-13));
  CHECK(std::abs(double(cache.moment(0, {1, 0}, 0))) < 1e-15);
  CHECK(std::abs(double(cache.moment(0, {0, 0}, 1))) < 1e-15);
  for (int k = 0; k <= 2; ++k) {
    for (int mode = 0; mode < 7; ++mode) {
      for (const Monomial& m : stencil_for_order(4).monomials) {
        const double oracle = testing::polar_moment(k, mode, m, b);
        CHECK(std::abs(double(cache.moment(k, m, mode)) - oracle) <= 1e-13 * std::max(1.0, std::abs(oracle)));
      }
    }
  }
}

TEST_CASE("weights at a fixed h reproduce every test moment") {
  const BumpFunction b;
  const double h = 1.0 / 16;
  for (auto [k, p] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 3}, std::pair{2, 4}}) {
    const GridOffset off{0.3, 0.7};
    const GridOffset use = p == 1 ? GridOffset{0.3, -0.3} : off;
    const WeightMatrix W = compute_weights_at_h(k, p, use, 2, h, recommended_precision(k, p));
    for (int mode = 0; mode < 5; ++mode) {
      for (int t = 0; t < stencil_size(p); ++t) {
        const double exact = testing::polar_moment(k, mode, stencil_for_order(p).monomials[t], b);
        CHECK(std::abs(replay(k, p, mode, t, use, h, W, b) - exact) <=
              1e-11 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST_CASE("h -> 0 limit: default tolerances, stationary input and monotone refinement") {
  CHECK(default_tolerance(1) == 1e-8);
  CHECK(default_tolerance(3) == 1e-8);
  CHECK(default_tolerance(4) == 1e-4);

  // k = 1, phi = 1 on a node: the full trapezoidal sum of g is spectrally accurate, so the
  // weight is the removed node value 1. The steep bump blend needs h <= 2^-6 to settle.
  const WeightLimit flat = compute_weights_limit(1, 1, {0, 0}, 1, 1e-8, Precision::Extended);
  CHECK(flat.level <= 6);
  CHECK(std::abs(double(flat.weights(0, 0)) - 1.0) < 1e-8);

  // k = 0 constant mode, p = 1: distance to the finest weight shrinks with j down to roundoff.
  const auto at = [](int j) {
    return compute_weights_at_h(0, 1, {0, 0}, 1, 1.0 / double(1 << j), Precision::Extended)(0, 0);
  };
  const long double finest = at(12);
  double prev = 1e300;
  for (int j = 2; j <= 10; ++j) {
    const double dist = double(std::abs(at(j) - finest));
    if (prev > 1e-12) CHECK(dist <= prev);
    prev = dist;
  }
  CHECK_THROWS_AS(compute_weights_limit(0, 1, {0, 0}, 1, 0.0, Precision::Extended),
                  std::invalid_argument);
}

TEST_CASE("Fourier coefficients of the test profile") {
  const SingularTerm s = testfn::single_term(0);
  const FourierCoefficients& c = s.coeffs;
  CHECK(c.a0 == doctest::Approx(4.2398).epsilon(1e-12));
  CHECK(std::abs(c.a(0) - 0.816735 * std::cos(0.2)) < 1e-12);
  CHECK(std::abs(c.b(0) - 0.816735 * std::sin(0.2)) < 1e-12);
  CHECK(std::abs(c.a(1) + 1.24397865 * std::sin(0.1)) < 1e-12);
  CHECK(std::abs(c.b(1) + 1.24397865 * std::cos(0.1)) < 1e-12);
  for (int j = 2; j < c.modes(); ++j) {
    CHECK(std::abs(c.a(j)) < 1e-12);
    CHECK(std::abs(c.b(j)) < 1e-12);
  }
  CHECK(c.tail_ratio(2) < 1e-14);
}

TEST_CASE("combined weights are linear in the profile") {
  const WeightMatrix W = compute_weights_at_h(0, 2, {0.25, 0.5}, 3, 1.0 / 8, Precision::Extended);
  const auto c1 = make_singular_term(0, [](double t) { return 1 + std::cos(t); }).coeffs;
  const auto c2 = make_singular_term(0, [](double t) { return std::sin(3 * t) - 0.5; }).coeffs;
  const auto mix = make_singular_term(0, [](double t) {
                     return 2.5 * (1 + std::cos(t)) - 1.5 * (std::sin(3 * t) - 0.5);
                   }).coeffs;
  const Eigen::VectorXd lhs = combine_modes(W, mix);
  const Eigen::VectorXd rhs = 2.5 * combine_modes(W, c1) - 1.5 * combine_modes(W, c2);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
}

TEST_CASE("table lattice entries equal direct limits; interpolation is exact on the lattice") {
  const WeightTable t = build_weight_table(0, 2, 2, 4);
  CHECK(t.tol == 1e-8);
  CHECK(t.h_star_max > 0);
  for (int m = 0; m < t.resolution; ++m) {
    for (int n = 0; n < t.resolution; ++n) CHECK(t.at(m, n).allFinite());
  }
  const int m = 1, n = 2;
  const GridOffset off{t.lattice(m), t.lattice(n)};
  const WeightLimit direct = compute_weights_limit(0, 2, off, 2, t.tol, t.precision);
  CHECK((direct.weights.cast<double>() - t.at(m, n)).cwiseAbs().maxCoeff() == 0.0);

  const SingularTerm s = make_singular_term(0, [](double x) { return 1.2 - 0.3 * std::sin(2 * x); });
  const InterpolatedWeights iw = interpolate_weights(t, s, off);
  const Eigen::MatrixXd block = t.at(m, n);
  CHECK((iw.weights - combine_modes(block, s.coeffs)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_FALSE(iw.tail_warning);

  const SingularTerm constant = make_singular_term(0, [](double) { return 2.0; });
  const Eigen::VectorXd w0 = interpolate_weights(t, constant, {0.37, 0.61}).weights;
  const Eigen::VectorXd w1 =
      interpolate_weights(t, make_singular_term(0, [](double) { return 1.0; }), {0.37, 0.61}).weights;
  CHECK((w0 - 2.0 * w1).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(interpolate_weights(t, testfn::single_term(1), off), std::invalid_argument);
  const SingularTerm wide = make_singular_term(0, [](double x) { return std::cos(7 * x); });
  CHECK(interpolate_weights(t, wide, off).tail_warning);
}

TEST_CASE("table save, load and version refusal") {
  const WeightTable t = build_weight_table(1, 1, 1, 4);
  const auto dir = std::filesystem::temp_directory_path() / "ctrap_unit_tables";
  std::filesystem::remove_all(dir);
  const auto path = weight_table_path(dir, 1, 1, 1);
  save_weight_table(t, path);
  CHECK(std::filesystem::exists(path.string() + ".json"));
  const WeightTable back = load_weight_table(path);
  CHECK(back.k == 1);
  CHECK(back.p == 1);
  CHECK(back.N == 1);
  CHECK(back.resolution == 4);
  CHECK(back.lo == t.lo);
  CHECK(back.h_star_max == t.h_star_max);
  CHECK(back.data == t.data);

  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    const char v = 2;
    f.write(&v, 1);
  }
  CHECK_THROWS_WITH_AS(load_weight_table(path), doctest::Contains("format version"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(load_table_weights({{0, 2}}, 1, dir), doctest::Contains("ctrap weights build"),
                       std::runtime_error);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
