#pragma once

#include "ctrap/geometry.hpp"
#include "ctrap/kernels3d.hpp"
#include "ctrap/quadrature.hpp"
#include "ctrap/surfaces.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace ctrap {

/// Normalization a of delta(t) = a exp(2 / (t^2 - 1)) on (-1, 1), by composite Gauss-Legendre.
double averaging_constant();

/// delta(eta / eps) / eps; zero for |eta| >= eps.
double delta_eps(double eta, double eps);

/// Slicing axis for normal n = (sin t cos p, sin t sin p, cos t): z if |tan t| < sqrt 2,
/// else y if |tan p| >= 1, else x.
int dominant_direction(const Eigen::Vector3d& n);

enum class JacobianSource { FiniteDifference, Analytic };

struct TubeOptions {
  double eps = 0.1;
  /// Grid nodes are origin + h Z^3.
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  JacobianSource jacobian = JacobianSource::FiniteDifference;
  /// Spacing of the FD4 differences of P_Gamma is min(h, fd_cap).
  double fd_cap = 0.025;
};

struct TubeNode {
  Eigen::Vector3i index;
  Eigen::Vector3d point;   // P_Gamma(node)
  Eigen::Vector3d normal;  // normal at P_Gamma(node)
  double distance = 0.0;
  /// rho(P_Gamma) delta_eps(d_Gamma) J
  double v = 0.0;
};

/// Nodes of a uniform grid inside the open tube |d_Gamma| < eps, in lexicographic index order.
class TubeGrid {
public:
  static TubeGrid build(const SurfaceHandle& surface, const Density& rho, double h,
                        const TubeOptions& opt = {});

  double h() const { return h_; }
  double eps() const { return eps_; }
  const Eigen::Vector3d& origin() const { return origin_; }
  const SurfaceHandle& surface() const { return *surface_; }
  const std::vector<TubeNode>& nodes() const { return nodes_; }
  Eigen::Vector3d position(const Eigen::Vector3i& idx) const {
    return origin_ + h_ * idx.cast<double>();
  }
  /// Node at a grid index, or nullptr when the index lies outside the tube.
  const TubeNode* find(const Eigen::Vector3i& idx) const;
  /// Range of grid indices along an axis over the tube nodes.
  std::pair<int, int> index_range(int axis) const;

  static std::int64_t key(const Eigen::Vector3i& idx);

private:
  double h_ = 0.0;
  double eps_ = 0.0;
  Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
  const SurfaceHandle* surface_ = nullptr;
  std::vector<TubeNode> nodes_;
  std::vector<std::int64_t> keys_;
};

struct V3Report {
  double value = 0.0;
  int axis = 2;
  int planes = 0;
  int corrected_planes = 0;
  /// Largest relative Fourier tail of s0, s1 beyond the weight tables' mode count.
  double max_tail_ratio = 0.0;
};

struct V3Options {
  /// Fourier modes carried by the weight provider; only used for the tail diagnostic.
  int modes = 32;
  int angular_samples = 4096;
};

/// Plane-by-plane third-order corrected rule: punctured sum outside the per-plane 4-node
/// stencils, Q^2 weights for s0 on those stencils, the Q^1 weight for s1 at the nearest node and
/// (s - s0) v on the remaining three nodes. Planes whose singular point lies outside the tube
/// contribute their plain trapezoidal sum.
V3Report evaluate_V3(KernelType type, const TubeGrid& tube, const SurfaceProbe& probe,
                     const WeightProvider& weights, const V3Options& opt = {});

/// Baseline: the same plane decomposition with only the nearest node removed per plane.
double evaluate_punctured3(KernelType type, const TubeGrid& tube, const SurfaceProbe& probe);

/// Convenience form that builds the tube and an FD probe (spacing min(h, fd_cap), offset eps/2).
double evaluate_V3(KernelType type, const SurfaceHandle& surface, const Density& rho,
                   const Eigen::Vector3d& xstar, double h, double eps, const WeightProvider& weights);

/// FD probe used by the 3D rule at grid spacing h.
SurfaceProbe tube_probe(const SurfaceHandle& surface, const Eigen::Vector3d& xstar, double h,
                        const TubeOptions& opt = {});

}  // namespace ctrap
