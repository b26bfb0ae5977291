#pragma once

#include "ctrap/singular_term.hpp"
#include "ctrap/stencil.hpp"
#include "ctrap/summation.hpp"
#include "ctrap/weights.hpp"

#include <Eigen/Core>

#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace ctrap {

namespace detail {

inline void check_finite(double v, const Eigen::Vector2i& ij) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite integrand value at node (" << ij.x() << ", " << ij.y() << ")";
    throw std::domain_error(os.str());
  }
}

inline bool contains(const std::vector<Eigen::Vector2i>& nodes, const Eigen::Vector2i& ij) {
  for (const auto& n : nodes) {
    if (n == ij) return true;
  }
  return false;
}

/// Row-major sum of f over the grid, skipping `skip`; rows are combined with compensated summation.
template <class F>
double grid_sum(F&& f, const Grid2& grid, const std::vector<Eigen::Vector2i>& skip) {
  KahanSum<double> total;
  for (int j = grid.lo.y(); j <= grid.hi.y(); ++j) {
    KahanSum<double> row;
    for (int i = grid.lo.x(); i <= grid.hi.x(); ++i) {
      const Eigen::Vector2i ij(i, j);
      if (!skip.empty() && contains(skip, ij)) continue;
      const double v = f(grid.node(ij));
      check_finite(v, ij);
      row += v;
    }
    total += row.value();
  }
  return total.value();
}

}  // namespace detail

/// h^2 * sum of f over every grid node.
template <class F>
double trapezoidal(F&& f, const Grid2& grid) {
  validate(grid);
  return grid.h * grid.h * detail::grid_sum(f, grid, {});
}

/// Trapezoidal sum with the stencil nodes removed.
template <class F>
double punctured_trapezoidal(F&& f, const Grid2& grid, const LocatedStencil& excluded) {
  validate(grid);
  const auto skip = excluded.nodes();
  for (const auto& n : skip) {
    if (!grid.contains(n)) throw std::out_of_range("punctured_trapezoidal: excluded node off grid");
  }
  return grid.h * grid.h * detail::grid_sum(f, grid, skip);
}

/// Source of correction weights for a singular term at a grid offset.
class WeightProvider {
public:
  virtual ~WeightProvider() = default;
  /// p~ weights of the order-p correction for `term` at `offset`, in stencil node order.
  virtual Eigen::VectorXd weights(const SingularTerm& term, int p, GridOffset offset) const = 0;
};

/// Weights solved directly at the requested offset (no tabulation), memoized.
class DirectWeights : public WeightProvider {
public:
  /// tol: h -> 0 stopping tolerance; precision floor raised to the recommended level per (k, p).
  explicit DirectWeights(double tol = 1e-11, Precision floor = Precision::Extended,
                         WeightOptions opt = {});
  Eigen::VectorXd weights(const SingularTerm& term, int p, GridOffset offset) const override;
  /// Per-mode weights (p~ x (2N+1)) with the memo.
  const WeightMatrix& per_mode(int k, int p, GridOffset offset, int N) const;

private:
  double tol_;
  Precision floor_;
  WeightOptions opt_;
  mutable std::mutex mutex_;
  mutable std::map<std::tuple<int, int, double, double, int>, WeightMatrix> memo_;
};

/// Weights interpolated from prebuilt tables keyed by (k, p).
class TableWeights : public WeightProvider {
public:
  void add(std::shared_ptr<const WeightTable> table);
  bool has(int k, int p) const;
  const WeightTable& table(int k, int p) const;
  Eigen::VectorXd weights(const SingularTerm& term, int p, GridOffset offset) const override;

private:
  std::map<std::pair<int, int>, std::shared_ptr<const WeightTable>> tables_;
};

/// Loads the (k, p) tables with N modes from a cache directory. A missing or stale table raises
/// std::runtime_error naming the command that builds it.
TableWeights load_table_weights(const std::vector<std::pair<int, int>>& kp, int N,
                                const std::filesystem::path& dir);

/// Highest Fourier mode of phi above rel_tol of its largest coefficient (at least 1).
int significant_modes(const FourierCoefficients& c, double rel_tol = 1e-14);

/// Punctured sum of s_k(x - x0) v(x) plus h^(k+1) sum_i w_i v(x_i) over the order-p stencil.
template <class V>
double corrected_Qp(const SingularTerm& term, V&& v, const Eigen::Vector2d& x0, const Grid2& grid,
                    int p, const WeightProvider& provider) {
  const LocatedStencil ls = locate_singularity(x0, grid, p);
  const Eigen::VectorXd w = provider.weights(term, p, ls.offset);
  const auto nodes = ls.nodes();
  const double h = grid.h;
  double corr = 0;
  for (int i = 0; i < int(nodes.size()); ++i) corr += w(i) * v(grid.node(nodes[i]));
  const double punct = punctured_trapezoidal(
      [&](const Eigen::Vector2d& x) {
        const double vx = v(x);
        return vx == 0.0 ? 0.0 : term(x - x0) * vx;
      },
      grid, ls);
  return punct + std::pow(h, term.k + 1) * corr;
}

/// Composite order-p rule: s_k corrected at order p-1-k on nested stencils, remainder
/// s - sum s_k punctured only at the nearest node.
template <class V>
double composite_Up(const SingularFunction& s, V&& v, const Eigen::Vector2d& x0, const Grid2& grid,
                    int p, const WeightProvider& provider) {
  if (p < 2 || p > 5) throw std::out_of_range("composite_Up: p must be in 2..5");
  const int nterms = p - 1;
  if (int(s.terms.size()) < nterms) {
    throw std::invalid_argument("composite_Up: order " + std::to_string(p) + " needs " +
                                std::to_string(nterms) + " expansion terms");
  }
  const double h = grid.h;
  std::vector<LocatedStencil> located(nterms);
  std::vector<std::vector<Eigen::Vector2i>> nodes(nterms);
  for (int k = 0; k < nterms; ++k) {
    located[k] = locate_singularity(x0, grid, p - 1 - k);
    nodes[k] = located[k].nodes();
  }
  const auto& largest = nodes[0];
  const auto& nearest = nodes[nterms - 1];

  // Full s outside the largest stencil.
  const double outside = punctured_trapezoidal(
      [&](const Eigen::Vector2d& x) {
        const double vx = v(x);
        return vx == 0.0 ? 0.0 : s.full(x - x0) * vx;
      },
      grid, located[0]);

  // Per-term weights, and the terms at largest-stencil nodes outside their own stencil.
  KahanSum<double> inside;
  for (int k = 0; k < nterms; ++k) {
    const Eigen::VectorXd w = provider.weights(s.terms[k], p - 1 - k, located[k].offset);
    double corr = 0;
    for (int i = 0; i < int(nodes[k].size()); ++i) corr += w(i) * v(grid.node(nodes[k][i]));
    inside += std::pow(h, k + 1) * corr;
    for (const auto& n : largest) {
      if (detail::contains(nodes[k], n)) continue;
      const Eigen::Vector2d x = grid.node(n);
      inside += h * h * s.terms[k](x - x0) * v(x);
    }
  }
  // Remainder on the largest stencil minus the nearest node.
  for (const auto& n : largest) {
    if (detail::contains(nearest, n)) continue;
    const Eigen::Vector2d x = grid.node(n);
    inside += h * h * s.remainder(x - x0, nterms - 1) * v(x);
  }
  return outside + inside.value();
}

}  // namespace ctrap
