#include "ctrap/study.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ctrap {

std::vector<double> h_sequence(double h0, double ratio, int count) {
  if (!(h0 > 0) || !(ratio > 1) || count < 1) {
    throw std::invalid_argument("h_sequence: need h0 > 0, ratio > 1, count >= 1");
  }
  std::vector<double> hs(count);
  for (int i = 0; i < count; ++i) hs[i] = h0 / std::pow(ratio, i);
  return hs;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderEstimate observed_order(const std::vector<double>& values, const std::vector<double>& hs,
                             double floor_rel, int window) {
  if (values.size() != hs.size() || values.size() < 3) {
    throw std::invalid_argument("observed_order: need >= 3 matching values and spacings");
  }
  OrderEstimate est;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    est.differences.push_back(std::abs(values[i] - values[i + 1]));
  }
  for (std::size_t i = 0; i + 1 < est.differences.size(); ++i) {
    est.local_orders.push_back(std::log(est.differences[i] / est.differences[i + 1]) /
                               std::log(hs[i] / hs[i + 1]));
  }
  est.slope = loglog_slope(std::vector<double>(hs.begin(), hs.end() - 1), est.differences);
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  const double floor = floor_rel * scale;
  std::vector<double> hx, ex;
  for (std::size_t i = 0; i < est.differences.size(); ++i) {
    if (est.differences[i] > floor) {
      hx.push_back(hs[i]);
      ex.push_back(est.differences[i]);
    }
  }
  est.resolved = int(ex.size());
  const std::size_t first = ex.size() > std::size_t(window) ? ex.size() - window : 0;
  est.asymptotic = loglog_slope(std::vector<double>(hx.begin() + first, hx.end()),
                                std::vector<double>(ex.begin() + first, ex.end()));
  return est;
}

namespace testfn {

double v(const Eigen::Vector2d& x) {
  const Eigen::Vector2d c(0.027, 0.0197);
  const double d2 = (x - c).squaredNorm();
  const double d8 = d2 * d2 * d2 * d2;
  if (d8 > 740.0) return 0.0;
  // Re H^(1)_nu(3) = J_nu(3) for real order.
  const double bessel = std::cyl_bessel_j(x.squaredNorm() + 1.0, 3.0);
  return (1.1 + bessel) * std::exp(-d8) * (0.5 + std::sin(x.x() * (x.y() - 1.0)));
}

double phi0(double psi) {
  return 4.2398 + 0.816735 * std::cos(psi - 0.2) - 1.24397865 * std::sin(2 * psi + 0.1);
}
double phi1(double psi) {
  return 0.78167 * std::sin(psi + 0.5) - 2.24397865 * std::cos(3 * psi - 0.3);
}
double phi2(double psi) {
  return 1.127 + 1.2134875 * std::cos(psi - 0.65) - 1.24397865 * std::sin(2 * psi + 0.1);
}
double phi3(double psi) {
  return 0.77 - 1.29 * std::cos(4 * psi - 0.35) + 0.987 * std::sin(2 * psi + 0.14);
}
double r_factor(const Eigen::Vector2d& x) {
  const double psi = std::atan2(x.y(), x.x());
  return 1.2927 - 0.929 * std::cos(psi + 0.34) + 0.712 * std::sin(3 * psi + 0.14) +
         std::log(x.norm() + 1.3);
}

SingularTerm single_term(int k) { return make_singular_term(k, phi0); }

SingularFunction general() {
  SingularFunction s;
  s.terms = {make_singular_term(0, phi0), make_singular_term(1, phi1),
             make_singular_term(2, phi2), make_singular_term(3, phi3)};
  s.full = [](const Eigen::Vector2d& x) {
    const double r = x.norm();
    const double psi = std::atan2(x.y(), x.x());
    return phi0(psi) / r + phi1(psi) + r * phi2(psi) + r * r * phi3(psi) +
           r * r * r * r_factor(x);
  };
  return s;
}

}  // namespace testfn

Grid2 study_grid(double h, GridOffset offset) {
  const Eigen::Vector2d origin(-offset.alpha * h, -offset.beta * h);
  return Grid2::covering(h, origin, Eigen::Vector2d::Zero(), testfn::kSupportHalfWidth);
}

double quad2d_single(int k, int p, double h, GridOffset offset, const WeightProvider& weights) {
  const Grid2 grid = study_grid(h, offset);
  const SingularTerm term = testfn::single_term(k);
  const Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  if (p == 0) {
    const auto ls = locate_singularity(x0, grid, 1);
    return punctured_trapezoidal(
        [&](const Eigen::Vector2d& x) {
          const double vx = testfn::v(x);
          return vx == 0.0 ? 0.0 : term(x - x0) * vx;
        },
        grid, ls);
  }
  return corrected_Qp(term, testfn::v, x0, grid, p, weights);
}

double quad2d_general(int p, double h, GridOffset offset, const WeightProvider& weights) {
  const Grid2 grid = study_grid(h, offset);
  const SingularFunction s = testfn::general();
  const Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  if (p == 0) {
    const auto ls = locate_singularity(x0, grid, 1);
    return punctured_trapezoidal(
        [&](const Eigen::Vector2d& x) {
          const double vx = testfn::v(x);
          return vx == 0.0 ? 0.0 : s.full(x - x0) * vx;
        },
        grid, ls);
  }
  return composite_Up(s, testfn::v, x0, grid, p, weights);
}

double quad2d_remainder(int q, double h, GridOffset offset) {
  const Grid2 grid = study_grid(h, offset);
  const SingularFunction s = testfn::general();
  const Eigen::Vector2d x0 = Eigen::Vector2d::Zero();
  const auto ls = locate_singularity(x0, grid, 1);
  return punctured_trapezoidal(
      [&](const Eigen::Vector2d& x) {
        const double vx = testfn::v(x);
        return vx == 0.0 ? 0.0 : s.remainder(x - x0, q) * vx;
      },
      grid, ls);
}

// ---------------------------------------------------------------------------------------------
// 3D self-convergence on the torus

std::vector<TorusTarget> random_torus_targets(const Torus& torus, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::vector<TorusTarget> out(count);
  for (auto& t : out) {
    t.theta = angle(rng);
    t.phi = angle(rng);
    t.point = torus.point(t.theta, t.phi);
  }
  return out;
}

Ibim3dLevel ibim3d_level(const SurfaceHandle& surface, const Density& rho,
                         const std::vector<TorusTarget>& targets, double h,
                         const WeightProvider& weights, const Ibim3dOptions& opt) {
  TubeOptions tube_opt;
  tube_opt.eps = opt.eps;
  tube_opt.jacobian = opt.jacobian;
  const TubeGrid tube = TubeGrid::build(surface, rho, h, tube_opt);
  Ibim3dLevel level;
  level.h = h;
  level.nodes = tube.nodes().size();
  level.corrected.resize(targets.size());
  if (opt.punctured) level.punctured.resize(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const SurfaceProbe probe = tube_probe(surface, targets[i].point, h, tube_opt);
    for (int k = 0; k < 3; ++k) {
      const V3Report rep = evaluate_V3(KernelType(k), tube, probe, weights);
      level.corrected[i][k] = rep.value;
      level.max_tail_ratio = std::max(level.max_tail_ratio, rep.max_tail_ratio);
      if (opt.punctured) level.punctured[i][k] = evaluate_punctured3(KernelType(k), tube, probe);
    }
  }
  return level;
}

std::vector<double> Ibim3dStudy::hs() const {
  std::vector<double> out;
  for (const auto& l : levels) out.push_back(l.h);
  return out;
}

std::vector<std::vector<double>> Ibim3dStudy::errors(KernelType type, bool punctured) const {
  const int k = int(type);
  const auto& ref = punctured ? reference.punctured : reference.corrected;
  std::vector<std::vector<double>> out;
  for (const auto& l : levels) {
    const auto& vals = punctured ? l.punctured : l.corrected;
    std::vector<double> e(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) e[i] = std::abs(vals[i][k] - ref[i][k]);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<double> Ibim3dStudy::mean_errors(KernelType type, bool punctured) const {
  std::vector<double> out;
  for (const auto& e : errors(type, punctured)) {
    double m = 0;
    for (double x : e) m += x;
    out.push_back(e.empty() ? 0.0 : m / double(e.size()));
  }
  return out;
}

double Ibim3dStudy::mean_order(KernelType type, bool punctured) const {
  return loglog_slope(hs(), mean_errors(type, punctured));
}

Ibim3dStudy ibim3d_study(const SurfaceHandle& surface, const Density& rho,
                         const std::vector<TorusTarget>& targets, const std::vector<double>& hs,
                         const WeightProvider& weights, const Ibim3dOptions& opt,
                         const Ibim3dProgress& progress) {
  if (hs.empty()) throw std::invalid_argument("ibim3d_study: empty h sequence");
  Ibim3dStudy study;
  for (double h : hs) {
    study.levels.push_back(ibim3d_level(surface, rho, targets, h, weights, opt));
    if (progress) progress(study.levels.back());
  }
  const double href = 0.5 * *std::min_element(hs.begin(), hs.end());
  study.reference = ibim3d_level(surface, rho, targets, href, weights, opt);
  if (progress) progress(study.reference);
  return study;
}

}  // namespace ctrap
