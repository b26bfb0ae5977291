#pragma once

#include "ctrap/ibim3d.hpp"
#include "ctrap/kernels3d.hpp"
#include "ctrap/quadrature.hpp"
#include "ctrap/surfaces.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <cstdint>
#include <string>
#include <vector>

namespace ctrap {

/// Geometric h sequence h0, h0/ratio, ..., count entries.
std::vector<double> h_sequence(double h0, double ratio, int count);

/// Successive-difference convergence summary of a value sequence on a geometric h sequence.
struct OrderEstimate {
  std::vector<double> differences;   // |Q(h_i) - Q(h_{i+1})|
  std::vector<double> local_orders;  // log(e_i / e_{i+1}) / log(ratio)
  double slope = 0.0;                // least-squares slope of log e_i against log h_i
  /// Slope over the finest `window` differences that sit above the roundoff floor.
  double asymptotic = 0.0;
  int resolved = 0;  // differences above the floor
};

/// floor_rel: differences below floor_rel * max(1, max |Q|) count as roundoff.
OrderEstimate observed_order(const std::vector<double>& values, const std::vector<double>& hs,
                             double floor_rel = 1e-13, int window = 3);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

namespace testfn {

/// Smooth compactly decaying factor used by both 2D test integrands.
double v(const Eigen::Vector2d& x);

/// Angular profile shared by the single-term tests and the leading general term.
double phi0(double psi);
double phi1(double psi);
double phi2(double psi);
double phi3(double psi);
double r_factor(const Eigen::Vector2d& x);

/// s_k(x) = |x|^(k-1) phi0.
SingularTerm single_term(int k);
/// s = |x|^-1 phi0 + phi1 + |x| phi2 + |x|^2 phi3 + |x|^3 r, with the four homogeneous terms.
SingularFunction general();

/// Half-width of the box on which v is numerically nonzero (exp underflows beyond it).
inline constexpr double kSupportHalfWidth = 2.35;

}  // namespace testfn

/// Grid of spacing h whose singular point x0 = 0 sits at offset (alpha, beta) in its cell.
Grid2 study_grid(double h, GridOffset offset);

/// p = 0 selects the punctured rule (nearest node removed); otherwise Q_h^p on s_k v.
double quad2d_single(int k, int p, double h, GridOffset offset, const WeightProvider& weights);

/// p = 0 selects the punctured rule; otherwise the composite U_h^p on s v.
double quad2d_general(int p, double h, GridOffset offset, const WeightProvider& weights);

/// Punctured rule on the remainder s - s_0 - ... - s_q of the general test function.
double quad2d_remainder(int q, double h, GridOffset offset);

// ---------------------------------------------------------------------------------------------
// 3D self-convergence on the torus

struct TorusTarget {
  double theta = 0.0;
  double phi = 0.0;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
};

/// Targets drawn uniformly in (theta, phi) from a seeded mt19937_64.
std::vector<TorusTarget> random_torus_targets(const Torus& torus, int count, std::uint64_t seed);

struct Ibim3dOptions {
  double eps = 0.1;
  JacobianSource jacobian = JacobianSource::FiniteDifference;
  /// Also evaluate the punctured baseline.
  bool punctured = false;
};

/// Values at one grid size: [target][kernel] with kernels ordered SL, DL, DLC.
struct Ibim3dLevel {
  double h = 0.0;
  std::size_t nodes = 0;
  std::vector<std::array<double, 3>> corrected;
  std::vector<std::array<double, 3>> punctured;
  double max_tail_ratio = 0.0;
};

Ibim3dLevel ibim3d_level(const SurfaceHandle& surface, const Density& rho,
                         const std::vector<TorusTarget>& targets, double h,
                         const WeightProvider& weights, const Ibim3dOptions& opt = {});

/// Levels h_i plus the reference at half the smallest h.
struct Ibim3dStudy {
  std::vector<Ibim3dLevel> levels;
  Ibim3dLevel reference;

  std::vector<double> hs() const;
  /// |V(h_i) - V(h_ref)| per level and target.
  std::vector<std::vector<double>> errors(KernelType type, bool punctured = false) const;
  /// Mean over targets of the errors, per level.
  std::vector<double> mean_errors(KernelType type, bool punctured = false) const;
  /// Least-squares slope of log mean error against log h.
  double mean_order(KernelType type, bool punctured = false) const;
};

using Ibim3dProgress = std::function<void(const Ibim3dLevel&)>;

Ibim3dStudy ibim3d_study(const SurfaceHandle& surface, const Density& rho,
                         const std::vector<TorusTarget>& targets, const std::vector<double>& hs,
                         const WeightProvider& weights, const Ibim3dOptions& opt = {},
                         const Ibim3dProgress& progress = {});

}  // namespace ctrap
