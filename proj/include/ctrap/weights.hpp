#pragma once

#include "ctrap/bump.hpp"
#include "ctrap/gauss_legendre.hpp"
#include "ctrap/precision.hpp"
#include "ctrap/singular_term.hpp"
#include "ctrap/stencil.hpp"
#include "ctrap/summation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrap {

/// Number of angular basis functions for N Fourier modes: const, cos j, sin j for j = 1..N.
inline int mode_count(int N) { return 2 * N + 1; }

/// Working precision of the lattice sums. The right-hand sides cancel like h^(k+1+deg),
/// so high orders need more than double.
enum class Precision { Double, Extended, Quad };

const char* to_string(Precision p);
Precision precision_from_string(const std::string& s);
/// Cheapest precision that keeps the cancelled right-hand sides accurate for (k, p).
Precision recommended_precision(int k, int p);
bool quad_precision_available();

/// Numerical parameters shared by moment evaluation and weight solves.
struct WeightOptions {
  BumpFunction bump;
  int gl_nodes = 32;
  int gl_panels = 8;
  int angular_samples = 4096;
  int j_min = 2;
  int j_max = 14;
  double max_condition = 1e12;
};

/// Default convergence tolerance of the h -> 0 weight limit.
inline double default_tolerance(int p) { return p >= 4 ? 1e-4 : 1e-8; }

/// Solved weights are always carried in extended precision.
using WeightMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// Radial integrals of r^m g(r) and angular integrals of the Fourier basis against cos^a sin^b.
template <class Scalar>
class MomentCache {
public:
  MomentCache(const WeightOptions& opt, int max_power, int modes, int max_degree)
      : opt_(opt), modes_(modes), max_degree_(max_degree) {
    const auto rule = gauss_legendre<Scalar>(opt.gl_nodes);
    const Scalar r0 = Scalar(opt.bump.plateau_radius);
    const Scalar R = Scalar(opt.bump.support_radius);
    radial_.resize(max_power + 1);
    for (int m = 0; m <= max_power; ++m) {
      const Scalar inner = num::ipow(r0, m + 1) / Scalar(m + 1);
      const Scalar outer = composite_gauss_legendre<Scalar>(
          [&](Scalar r) { return num::ipow(r, m) * opt.bump(r); }, r0, R, opt.gl_panels, rule);
      radial_[m] = inner + outer;
    }
    // Trapezoid on the circle is exact for these trigonometric polynomials.
    const int n = opt.angular_samples;
    const int nm = 2 * modes + 1;
    angular_.assign(std::size_t(nm) * (max_degree + 1) * (max_degree + 1), Scalar(0));
    std::vector<Scalar> basis(nm);
    for (int s = 0; s < n; ++s) {
      const Scalar th = Scalar(2) * num::pi<Scalar>() * Scalar(s) / Scalar(n);
      const Scalar c = num::cos(th), sn = num::sin(th);
      basis[0] = 1;
      for (int j = 1; j <= modes; ++j) {
        basis[2 * j - 1] = num::cos(Scalar(j) * th);
        basis[2 * j] = num::sin(Scalar(j) * th);
      }
      Scalar ca = 1;
      for (int a = 0; a <= max_degree; ++a) {
        Scalar sb = 1;
        for (int b = 0; a + b <= max_degree; ++b) {
          for (int md = 0; md < nm; ++md) angular_[index(md, a, b)] += basis[md] * ca * sb;
          sb *= sn;
        }
        ca *= c;
      }
    }
    const Scalar w = Scalar(2) * num::pi<Scalar>() / Scalar(n);
    for (auto& v : angular_) v *= w;
  }

  Scalar radial(int m) const { return radial_.at(m); }
  Scalar angular(int mode, int a, int b) const { return angular_.at(index(mode, a, b)); }
  /// Integral over R^2 of |x|^(k-1) basis_mode(psi) g(|x|) x^a y^b.
  Scalar moment(int k, const Monomial& mono, int mode) const {
    return radial(k + mono.degree()) * angular(mode, mono.a, mono.b);
  }
  int modes() const { return modes_; }
  const WeightOptions& options() const { return opt_; }

private:
  std::size_t index(int mode, int a, int b) const {
    const int stride = max_degree_ + 1;
    return (std::size_t(mode) * stride + a) * stride + b;
  }

  WeightOptions opt_;
  int modes_;
  int max_degree_;
  std::vector<Scalar> radial_;
  std::vector<Scalar> angular_;
};

/// Weights at a fixed h for every Fourier basis function at once.
/// Column m holds the p~ weights of |x|^(k-1) basis_m(psi); rows follow the stencil node order.
/// Lattice sums run row by row in Scalar, rows are combined with compensated summation.
template <class Scalar>
WeightMatrix weights_at_h(int k, const Stencil& stencil, GridOffset offset, Scalar h,
                          const MomentCache<Scalar>& cache) {
  const int nt = stencil.size();
  const int nm = mode_count(cache.modes());
  const auto& bump = cache.options().bump;
  const Scalar alpha = Scalar(offset.alpha), beta = Scalar(offset.beta);
  const Scalar R = Scalar(bump.support_radius);

  int max_deg = 0;
  for (const auto& m : stencil.monomials) max_deg = std::max(max_deg, m.degree());

  // Test matrix on the stencil, rows scaled by h^-deg.
  WeightMatrix G(nt, nt);
  for (int i = 0; i < nt; ++i) {
    const long double u = stencil.offsets[i].x() - (long double)offset.alpha;
    const long double w = stencil.offsets[i].y() - (long double)offset.beta;
    const long double gr = bump((long double)h * std::sqrt(u * u + w * w));
    for (int t = 0; t < nt; ++t) {
      const auto& mono = stencil.monomials[t];
      G(t, i) = gr * num::ipow(u, mono.a) * num::ipow(w, mono.b);
    }
  }
  Eigen::JacobiSVD<WeightMatrix> svd(G);
  const auto& sv = svd.singularValues();
  if (!(sv(0) < (long double)cache.options().max_condition * sv(nt - 1))) {
    throw std::runtime_error("weights_at_h: ill-conditioned test matrix at (alpha, beta) = (" +
                             std::to_string(offset.alpha) + ", " + std::to_string(offset.beta) +
                             "), stencil order " + std::to_string(stencil.order));
  }

  // Punctured lattice sums of s * g * u^a w^b for every (test, mode) pair.
  std::vector<KahanSum<Scalar>> total(std::size_t(nt) * nm);
  std::vector<Scalar> row(std::size_t(nt) * nm);
  std::vector<Scalar> basis(nm), upow(max_deg + 1), wpow(max_deg + 1), base(nt);
  const Scalar Rh = R / h;
  const int reach = int(std::ceil(double(Rh))) + 2;
  const int ia = int(std::floor(offset.alpha)), jb = int(std::floor(offset.beta));
  for (int i = ia - reach; i <= ia + reach; ++i) {
    std::fill(row.begin(), row.end(), Scalar(0));
    const Scalar u = Scalar(i) - alpha;
    upow[0] = 1;
    for (int d = 1; d <= max_deg; ++d) upow[d] = upow[d - 1] * u;
    for (int j = jb - reach; j <= jb + reach; ++j) {
      const Scalar w = Scalar(j) - beta;
      const Scalar rho = num::sqrt(u * u + w * w);
      if (rho >= Rh) continue;
      bool excluded = false;
      for (const auto& o : stencil.offsets) {
        if (o.x() == i && o.y() == j) {
          excluded = true;
          break;
        }
      }
      if (excluded) continue;
      const Scalar g = bump(h * rho);
      // |u|^(k-1) in grid units; the h powers are applied to the totals.
      const Scalar rk = num::ipow(rho, k - 1);
      wpow[0] = 1;
      for (int d = 1; d <= max_deg; ++d) wpow[d] = wpow[d - 1] * w;
      // cos(m psi), sin(m psi) by powers of e^{i psi}.
      const Scalar ec = u / rho, es = w / rho;
      Scalar cm = 1, sm = 0;
      basis[0] = 1;
      for (int m = 1; m <= cache.modes(); ++m) {
        const Scalar c2 = cm * ec - sm * es;
        sm = sm * ec + cm * es;
        cm = c2;
        basis[2 * m - 1] = cm;
        basis[2 * m] = sm;
      }
      for (int t = 0; t < nt; ++t) {
        const auto& mono = stencil.monomials[t];
        base[t] = rk * g * upow[mono.a] * wpow[mono.b];
      }
      for (int t = 0; t < nt; ++t) {
        Scalar* r = &row[std::size_t(t) * nm];
        const Scalar bt = base[t];
        for (int m = 0; m < nm; ++m) r[m] += bt * basis[m];
      }
    }
    for (std::size_t q = 0; q < row.size(); ++q) total[q] += row[q];
  }

  // rhs = h^(-k-1-deg) * moment - (grid-unit sum); the lattice sum carries h^(2 + k - 1 + deg).
  WeightMatrix rhs(nt, nm);
  for (int t = 0; t < nt; ++t) {
    const auto& mono = stencil.monomials[t];
    const Scalar hk = num::ipow(h, -k - 1 - mono.degree());
    for (int m = 0; m < nm; ++m) {
      const Scalar v = hk * cache.moment(k, mono, m) - total[std::size_t(t) * nm + m].value();
      rhs(t, m) = (long double)v;
    }
  }
  return G.fullPivLu().solve(rhs);
}

/// Outcome of the h -> 0 limit: weights at h* = 2^-level and the last successive difference.
struct WeightLimit {
  WeightMatrix weights;
  int level = 0;
  double h_star = 0.0;
  double last_difference = 0.0;
};

/// Evaluates weights on h = 2^-j until two successive levels agree within tol (max norm over all
/// nodes and modes jointly). Returns the weights of the coarser of the two levels.
template <class Scalar>
WeightLimit weights_limit(int k, const Stencil& stencil, GridOffset offset,
                          const MomentCache<Scalar>& cache, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("weights_limit: tol must be positive");
  const auto& opt = cache.options();
  auto level_h = [](int j) { return Scalar(1) / Scalar(1LL << j); };
  WeightMatrix prev = weights_at_h<Scalar>(k, stencil, offset, level_h(opt.j_min), cache);
  double diff = 0;
  for (int j = opt.j_min; j < opt.j_max; ++j) {
    WeightMatrix next = weights_at_h<Scalar>(k, stencil, offset, level_h(j + 1), cache);
    diff = double((next - prev).cwiseAbs().maxCoeff());
    if (diff <= tol) return {std::move(prev), j, 1.0 / double(1LL << j), diff};
    prev = std::move(next);
  }
  throw std::runtime_error("weights_limit: no convergence by h = 2^-" + std::to_string(opt.j_max) +
                           " (last difference " + std::to_string(diff) + ")");
}

/// Largest monomial degree among the order-p test functions.
int max_test_degree(int p);

/// Type-erased entry points: moments and lattice sums in the requested precision.
WeightLimit compute_weights_limit(int k, int p, GridOffset offset, int N, double tol,
                                  Precision prec, const WeightOptions& opt = {});
WeightMatrix compute_weights_at_h(int k, int p, GridOffset offset, int N, double h, Precision prec,
                                  const WeightOptions& opt = {});

/// Contracts per-mode weights with the Fourier coefficients of phi.
Eigen::VectorXd combine_modes(const WeightMatrix& per_mode, const FourierCoefficients& c);
Eigen::VectorXd combine_modes(const Eigen::MatrixXd& per_mode, const FourierCoefficients& c);

/// Tabulated weights over an (alpha, beta) lattice covering [lo, lo + 1]^2.
struct WeightTable {
  static constexpr int kFormatVersion = 1;

  int k = 0;
  int p = 1;
  int N = 16;
  int resolution = 33;
  double lo = 0.0;
  double tol = 1e-8;
  double h_star_max = 0.0;
  double max_difference = 0.0;
  Precision precision = Precision::Double;
  WeightOptions options;
  // Lattice point (m, n) owns a p~ x (2N+1) column-major block at offset (m * resolution + n).
  std::vector<double> data;

  int rows() const { return stencil_size(p); }
  int cols() const { return mode_count(N); }
  double spacing() const { return 1.0 / (resolution - 1); }
  double lattice(int m) const { return lo + m * spacing(); }
  std::size_t block() const { return std::size_t(rows()) * cols(); }

  Eigen::Map<const Eigen::MatrixXd> at(int m, int n) const {
    return {data.data() + (std::size_t(m) * resolution + n) * block(), rows(), cols()};
  }
  Eigen::Map<Eigen::MatrixXd> at(int m, int n) {
    return {data.data() + (std::size_t(m) * resolution + n) * block(), rows(), cols()};
  }

  /// Per-mode weights at an arbitrary offset by tensor cubic Lagrange interpolation.
  Eigen::MatrixXd per_mode(GridOffset offset) const;
};

/// Progress callback: (lattice points done, total).
using BuildProgress = std::function<void(int, int)>;

/// tol <= 0 selects default_tolerance(p).
WeightTable build_weight_table(int k, int p, int N, int resolution, double tol = -1.0,
                               const WeightOptions& opt = {}, const BuildProgress& progress = {});

/// Result of interpolating a table against a concrete angular profile.
struct InterpolatedWeights {
  Eigen::VectorXd weights;
  double tail_ratio = 0.0;
  bool tail_warning = false;
};

InterpolatedWeights interpolate_weights(const WeightTable& table, const SingularTerm& term,
                                        GridOffset offset);

void save_weight_table(const WeightTable& table, const std::filesystem::path& file);
WeightTable load_weight_table(const std::filesystem::path& file);

/// Cache directory: explicit argument, else $CTRAP_CACHE_DIR, else ./ctrap_cache.
std::filesystem::path weight_cache_dir(const std::optional<std::filesystem::path>& dir = {});
std::filesystem::path weight_table_path(const std::filesystem::path& dir, int k, int p, int N);

}  // namespace ctrap
