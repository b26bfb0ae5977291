#include "ctrap/ibim3d.hpp"

#include "ctrap/gauss_legendre.hpp"
#include "ctrap/summation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctrap {

double averaging_constant() {
  static const double a = [] {
    const auto rule = gauss_legendre<long double>(20);
    const long double mass = composite_gauss_legendre<long double>(
        [](long double t) { return std::exp(2.0L / (t * t - 1.0L)); }, -1.0L, 1.0L, 64, rule);
    return double(1.0L / mass);
  }();
  return a;
}

double delta_eps(double eta, double eps) {
  const double t = eta / eps;
  if (!(std::abs(t) < 1.0)) return 0.0;
  return averaging_constant() * std::exp(2.0 / (t * t - 1.0)) / eps;
}

int dominant_direction(const Eigen::Vector3d& n) {
  const double tangential2 = n.x() * n.x() + n.y() * n.y();
  if (tangential2 < 2.0 * n.z() * n.z()) return 2;
  return std::abs(n.y()) >= std::abs(n.x()) ? 1 : 0;
}

// ---------------------------------------------------------------------------------------------
// Tube grid

std::int64_t TubeGrid::key(const Eigen::Vector3i& idx) {
  constexpr std::int64_t bias = 1 << 20;
  return ((idx.x() + bias) << 42) | ((idx.y() + bias) << 21) | (idx.z() + bias);
}

TubeGrid TubeGrid::build(const SurfaceHandle& surface, const Density& rho, double h,
                         const TubeOptions& opt) {
  if (!(h > 0)) throw std::invalid_argument("TubeGrid: h must be positive");
  if (!(opt.eps > 0) || !(opt.eps < surface.reach())) {
    throw std::invalid_argument("TubeGrid: need 0 < eps < reach of the surface");
  }
  TubeGrid g;
  g.h_ = h;
  g.eps_ = opt.eps;
  g.origin_ = opt.origin;
  g.surface_ = &surface;
  const AxisBox box = surface.bounds();
  Eigen::Vector3i lo, hi;
  for (int a = 0; a < 3; ++a) {
    lo(a) = int(std::floor((box.lo(a) - opt.eps - opt.origin(a)) / h)) - 1;
    hi(a) = int(std::ceil((box.hi(a) + opt.eps - opt.origin(a)) / h)) + 1;
  }
  const double hfd = std::min(h, opt.fd_cap);
  for (int i = lo.x(); i <= hi.x(); ++i) {
    for (int j = lo.y(); j <= hi.y(); ++j) {
      for (int k = lo.z(); k <= hi.z(); ++k) {
        const Eigen::Vector3i idx(i, j, k);
        const Eigen::Vector3d y = g.position(idx);
        const double d = surface.distance(y);
        if (!(std::abs(d) < opt.eps)) continue;
        const Projection pr = surface.project(y);
        double J;
        if (opt.jacobian == JacobianSource::FiniteDifference) {
          J = jacobian_fd(surface, y, hfd);
        } else {
          const SurfaceProbe ap = analytic_probe(surface, pr.point);
          J = 1.0 / ((1.0 + d * ap.kappa1) * (1.0 + d * ap.kappa2));
        }
        TubeNode node;
        node.index = idx;
        node.point = pr.point;
        node.normal = pr.normal;
        node.distance = d;
        node.v = rho(pr.point) * delta_eps(d, opt.eps) * J;
        g.nodes_.push_back(node);
        g.keys_.push_back(key(idx));
      }
    }
  }
  return g;
}

const TubeNode* TubeGrid::find(const Eigen::Vector3i& idx) const {
  const auto k = key(idx);
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  if (it == keys_.end() || *it != k) return nullptr;
  return &nodes_[std::size_t(it - keys_.begin())];
}

std::pair<int, int> TubeGrid::index_range(int axis) const {
  int lo = 0, hi = -1;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const int v = nodes_[i].index(axis);
    if (i == 0 || v < lo) lo = v;
    if (i == 0 || v > hi) hi = v;
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------------------------
// Plane-by-plane rules

namespace {

/// Singular point of plane `k` along the slicing axis.
struct PlaneSingularity {
  Eigen::Vector3d point;  // on the normal line through xstar
  Eigen::Vector2d y0;     // plane coordinates
  double eta = 0.0;
};

PlaneSingularity plane_singularity(const TubeGrid& tube, const SurfaceProbe& probe,
                                   const Eigen::Vector3i& ax, int k) {
  const int z = ax(2);
  const double zk = tube.origin()(z) + tube.h() * k;
  const double t = (zk - probe.xstar(z)) / probe.n(z);
  PlaneSingularity ps;
  ps.point = probe.xstar + t * probe.n;
  ps.y0 = Eigen::Vector2d(ps.point(ax(0)), ps.point(ax(1)));
  // Signed distance of the point along the normal line. It equals d_Gamma(point) inside the tube;
  // beyond the reach the line can re-enter the tube where the kernel is regular.
  ps.eta = t;
  return ps;
}

Eigen::Vector3i grid_index(const Eigen::Vector3i& ax, const Eigen::Vector2i& ij, int k) {
  Eigen::Vector3i idx;
  idx(ax(0)) = ij.x();
  idx(ax(1)) = ij.y();
  idx(ax(2)) = k;
  return idx;
}

double node_value(KernelType type, const SurfaceProbe& probe, const TubeNode& node) {
  return kernel_eval(type, probe.xstar, probe.n, node.point, node.normal) * node.v;
}

/// h^3 times the sum over tube nodes whose keys are not in `excluded` (sorted).
double punctured_sum(KernelType type, const TubeGrid& tube, const SurfaceProbe& probe,
                     const std::vector<std::int64_t>& excluded) {
  KahanSum<double> sum;
  auto ex = excluded.begin();
  for (const TubeNode& node : tube.nodes()) {
    const auto k = TubeGrid::key(node.index);
    while (ex != excluded.end() && *ex < k) ++ex;
    if (ex != excluded.end() && *ex == k) continue;
    if (node.v == 0.0) continue;
    sum += node_value(type, probe, node);
  }
  const double h = tube.h();
  return h * h * h * sum.value();
}

}  // namespace

V3Report evaluate_V3(KernelType type, const TubeGrid& tube, const SurfaceProbe& probe,
                     const WeightProvider& weights, const V3Options& opt) {
  V3Report rep;
  rep.axis = dominant_direction(probe.n);
  const Eigen::Vector3i ax = plane_axes(rep.axis);
  const PrincipalFrame frame = build_frame(probe, rep.axis);
  const CubicSurfaceModel model = cubic_model(probe);
  const double h = tube.h();
  const Eigen::Vector2d origin2(tube.origin()(ax(0)), tube.origin()(ax(1)));

  std::vector<std::int64_t> excluded;
  KahanSum<double> corrections;
  const auto [klo, khi] = tube.index_range(ax(2));
  for (int k = klo; k <= khi; ++k) {
    ++rep.planes;
    const PlaneSingularity ps = plane_singularity(tube, probe, ax, k);
    if (!(std::abs(ps.eta) < tube.eps())) continue;
    ++rep.corrected_planes;
    const KernelExpansion ex = expansion_at_plane(frame, model, ps.eta);
    const SingularTerm s0 = ex.term0(type, opt.angular_samples);
    const SingularTerm s1 = ex.term1(type, opt.angular_samples);
    rep.max_tail_ratio = std::max(
        {rep.max_tail_ratio, s0.coeffs.tail_ratio(opt.modes), s1.coeffs.tail_ratio(opt.modes)});
    const LocatedStencil four = locate_on_lattice(ps.y0, origin2, h, 2);
    const LocatedStencil near = locate_on_lattice(ps.y0, origin2, h, 1);
    const Eigen::VectorXd w0 = weights.weights(s0, 2, four.offset);
    const Eigen::VectorXd w1 = weights.weights(s1, 1, near.offset);
    const Eigen::Vector2i nearest = near.nodes().front();
    const auto nodes = four.nodes();
    for (int i = 0; i < int(nodes.size()); ++i) {
      const Eigen::Vector3i idx = grid_index(ax, nodes[i], k);
      excluded.push_back(TubeGrid::key(idx));
      const TubeNode* node = tube.find(idx);
      if (node == nullptr || node->v == 0.0) continue;
      corrections += h * h * w0(i) * node->v;
      if (nodes[i] == nearest) {
        corrections += h * h * h * w1(0) * node->v;
      } else {
        const Eigen::Vector2d y = h * nodes[i].cast<double>() + origin2 - ps.y0;
        corrections += h * h * h * (node_value(type, probe, *node) - ex.s0(type, y) * node->v);
      }
    }
  }
  std::sort(excluded.begin(), excluded.end());
  rep.value = punctured_sum(type, tube, probe, excluded) + corrections.value();
  return rep;
}

double evaluate_punctured3(KernelType type, const TubeGrid& tube, const SurfaceProbe& probe) {
  const int axis = dominant_direction(probe.n);
  const Eigen::Vector3i ax = plane_axes(axis);
  const Eigen::Vector2d origin2(tube.origin()(ax(0)), tube.origin()(ax(1)));
  std::vector<std::int64_t> excluded;
  const auto [klo, khi] = tube.index_range(ax(2));
  for (int k = klo; k <= khi; ++k) {
    const PlaneSingularity ps = plane_singularity(tube, probe, ax, k);
    if (!(std::abs(ps.eta) < tube.eps())) continue;
    const LocatedStencil near = locate_on_lattice(ps.y0, origin2, tube.h(), 1);
    excluded.push_back(TubeGrid::key(grid_index(ax, near.nodes().front(), k)));
  }
  std::sort(excluded.begin(), excluded.end());
  return punctured_sum(type, tube, probe, excluded);
}

SurfaceProbe tube_probe(const SurfaceHandle& surface, const Eigen::Vector3d& xstar, double h,
                        const TubeOptions& opt) {
  return fd_probe(surface, xstar, std::min(h, opt.fd_cap), 0.5 * opt.eps);
}

double evaluate_V3(KernelType type, const SurfaceHandle& surface, const Density& rho,
                   const Eigen::Vector3d& xstar, double h, double eps, const WeightProvider& weights) {
  TubeOptions opt;
  opt.eps = eps;
  const TubeGrid tube = TubeGrid::build(surface, rho, h, opt);
  return evaluate_V3(type, tube, tube_probe(surface, xstar, h, opt), weights).value;
}

}  // namespace ctrap
