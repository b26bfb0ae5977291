#include "ctrap/stencil.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ctrap {

namespace {

std::vector<Monomial> monomials_for_order(int p) {
  std::vector<Monomial> m;
  for (int d = 0; d <= p - 1; ++d) {
    for (int b = 0; b <= d; ++b) m.push_back({d - b, b});
  }
  if (p == 2) m.push_back({1, 1});
  if (p == 4) {
    m.push_back({4, 0});
    m.push_back({0, 4});
  }
  return m;
}

int rank_of(const std::vector<Eigen::Vector2i>& nodes, const std::vector<Monomial>& monos) {
  Eigen::MatrixXd mat(monos.size(), nodes.size());
  for (std::size_t t = 0; t < monos.size(); ++t) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      // Centre on the unit cell so the entries stay O(1).
      const double x = nodes[i].x() - 0.5;
      const double y = nodes[i].y() - 0.5;
      mat(t, i) = std::pow(x, monos[t].a) * std::pow(y, monos[t].b);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
  lu.setThreshold(1e-10);
  return int(lu.rank());
}

// Candidates ordered by distance to the cell centre, ties broken by angle from the anchor.
std::vector<Eigen::Vector2i> candidate_nodes() {
  std::vector<Eigen::Vector2i> c;
  for (int i = -2; i <= 3; ++i)
    for (int j = -2; j <= 3; ++j) c.emplace_back(i, j);
  auto key = [](const Eigen::Vector2i& v) {
    const double dx = v.x() - 0.5, dy = v.y() - 0.5;
    double ang = std::atan2(double(v.y()), double(v.x()));
    if (ang < 0) ang += 2 * std::numbers::pi;
    if (v.x() == 0 && v.y() == 0) ang = -1;
    return std::pair<double, double>(std::round((dx * dx + dy * dy) * 1e6), ang);
  };
  std::stable_sort(c.begin(), c.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return c;
}

std::array<Stencil, 4> build_stencils() {
  std::array<Stencil, 4> s;
  s[0].order = 1;
  s[0].offsets = {Eigen::Vector2i(0, 0)};
  s[0].monomials = monomials_for_order(1);

  s[1].order = 2;
  s[1].offsets = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  s[1].monomials = monomials_for_order(2);

  const auto candidates = candidate_nodes();
  for (int p = 3; p <= 4; ++p) {
    Stencil& st = s[p - 1];
    st.order = p;
    st.monomials = monomials_for_order(p);
    st.offsets = s[p - 2].offsets;
    const int target = int(st.monomials.size());
    int rank = rank_of(st.offsets, st.monomials);
    for (const auto& c : candidates) {
      if (int(st.offsets.size()) == target) break;
      if (std::find(st.offsets.begin(), st.offsets.end(), c) != st.offsets.end()) continue;
      auto trial = st.offsets;
      trial.push_back(c);
      const int r = rank_of(trial, st.monomials);
      if (r > rank) {
        st.offsets = std::move(trial);
        rank = r;
      }
    }
    if (rank != target) throw std::logic_error("stencil construction failed to reach full rank");
  }
  return s;
}

}  // namespace

Grid2 Grid2::covering(double h, const Eigen::Vector2d& origin, const Eigen::Vector2d& center,
                      double half_width) {
  Grid2 g;
  g.h = h;
  g.origin = origin;
  for (int d = 0; d < 2; ++d) {
    g.lo[d] = int(std::floor((center[d] - half_width - origin[d]) / h));
    g.hi[d] = int(std::ceil((center[d] + half_width - origin[d]) / h));
  }
  return g;
}

void validate(const Grid2& grid) {
  if (!(grid.h > 0) || !std::isfinite(grid.h)) throw std::invalid_argument("Grid2: h must be > 0");
  if ((grid.hi.array() < grid.lo.array()).any())
    throw std::invalid_argument("Grid2: empty extent");
}

const Stencil& stencil_for_order(int p) {
  static const std::array<Stencil, 4> stencils = build_stencils();
  if (p < 1 || p > 4) {
    throw std::out_of_range("stencil_for_order: order " + std::to_string(p) +
                            " not in 1..4");
  }
  return stencils[p - 1];
}

int stencil_size(int p) { return stencil_for_order(p).size(); }

std::vector<Eigen::Vector2i> LocatedStencil::nodes() const {
  std::vector<Eigen::Vector2i> out;
  out.reserve(stencil->offsets.size());
  for (const auto& o : stencil->offsets) out.push_back(anchor + o);
  return out;
}

Eigen::Vector2d LocatedStencil::relative(int i) const {
  const auto& o = stencil->offsets[i];
  return {o.x() - offset.alpha, o.y() - offset.beta};
}

LocatedStencil locate_on_lattice(const Eigen::Vector2d& x0, const Eigen::Vector2d& origin, double h,
                                 int p) {
  LocatedStencil ls;
  ls.stencil = &stencil_for_order(p);
  const Eigen::Vector2d t = (x0 - origin) / h;
  for (int d = 0; d < 2; ++d) {
    const double base = (p == 1) ? std::floor(t[d] + 0.5) : std::floor(t[d]);
    ls.anchor[d] = int(base);
    double frac = t[d] - base;
    // Guard the half-open interval against rounding.
    const double upper = (p == 1) ? 0.5 : 1.0;
    if (frac >= upper) {
      frac -= 1.0;
      ls.anchor[d] += 1;
    }
    (d == 0 ? ls.offset.alpha : ls.offset.beta) = frac;
  }
  return ls;
}

LocatedStencil locate_singularity(const Eigen::Vector2d& x0, const Grid2& grid, int p) {
  validate(grid);
  LocatedStencil ls = locate_on_lattice(x0, grid.origin, grid.h, p);
  int lo = 0, hi = 0;
  for (const auto& o : ls.stencil->offsets) {
    lo = std::min({lo, o.x(), o.y()});
    hi = std::max({hi, o.x(), o.y()});
  }
  const int margin = (hi - lo) + 1;
  for (const auto& o : ls.stencil->offsets) {
    const Eigen::Vector2i n = ls.anchor + o;
    const Eigen::Vector2i m = Eigen::Vector2i::Constant(margin);
    if (!grid.contains(n - m) || !grid.contains(n + m)) {
      throw std::out_of_range("locate_singularity: singular point too close to the grid boundary");
    }
  }
  return ls;
}

}  // namespace ctrap
