#pragma once

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrap {

/// Uniform 2D grid: nodes are origin + h * (i, j) for lo <= (i, j) <= hi.
struct Grid2 {
  double h = 1.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  Eigen::Vector2i lo = Eigen::Vector2i::Zero();
  Eigen::Vector2i hi = Eigen::Vector2i::Zero();

  Eigen::Vector2d node(int i, int j) const {
    return origin + h * Eigen::Vector2d(double(i), double(j));
  }
  Eigen::Vector2d node(const Eigen::Vector2i& ij) const { return node(ij.x(), ij.y()); }
  bool contains(const Eigen::Vector2i& ij) const {
    return (ij.array() >= lo.array()).all() && (ij.array() <= hi.array()).all();
  }
  long node_count() const {
    return long(hi.x() - lo.x() + 1) * long(hi.y() - lo.y() + 1);
  }

  /// Grid with spacing h whose nodes are origin + h*Z^2, covering the box [center - half, center + half].
  static Grid2 covering(double h, const Eigen::Vector2d& origin, const Eigen::Vector2d& center,
                        double half_width);
};

void validate(const Grid2& grid);

/// Position of the singular point relative to its stencil anchor, in units of h.
struct GridOffset {
  double alpha = 0.0;
  double beta = 0.0;
};

/// x^a y^b
struct Monomial {
  int a = 0;
  int b = 0;
  int degree() const { return a + b; }
};

/// Correction stencil for order p (1..4): node offsets relative to the anchor,
/// and the monomials whose products with the bump define the test functions.
struct Stencil {
  int order = 1;
  std::vector<Eigen::Vector2i> offsets;
  std::vector<Monomial> monomials;

  int size() const { return int(offsets.size()); }
};

/// Stencil sizes 1, 4, 6, 12 for p = 1..4. Stencils for p >= 2 are nested.
const Stencil& stencil_for_order(int p);

/// Number of nodes p~ used by the order-p correction.
int stencil_size(int p);

/// A stencil placed on a concrete grid around a singular point.
struct LocatedStencil {
  const Stencil* stencil = nullptr;
  Eigen::Vector2i anchor = Eigen::Vector2i::Zero();
  GridOffset offset;

  std::vector<Eigen::Vector2i> nodes() const;
  /// Position of stencil node i relative to the singular point, in units of h.
  Eigen::Vector2d relative(int i) const;
};

/// p = 1: nearest node with (alpha, beta) in [-1/2, 1/2)^2.
/// p >= 2: lower-left cell corner with (alpha, beta) in [0, 1)^2.
/// Throws if the stencil (plus its own diameter as margin) leaves the grid.
LocatedStencil locate_singularity(const Eigen::Vector2d& x0, const Grid2& grid, int p);

/// Same as above without the grid-extent check (unbounded lattice origin + hZ^2).
LocatedStencil locate_on_lattice(const Eigen::Vector2d& x0, const Eigen::Vector2d& origin, double h,
                                 int p);

}  // namespace ctrap
