// Acceptance run: one PASS/FAIL line per criterion.
#include "ctrap/geometry.hpp"
#include "ctrap/ibim3d.hpp"
#include "ctrap/kernels3d.hpp"
#include "ctrap/study.hpp"
#include "ctrap/weights.hpp"

#include "moment_oracle.hpp"
#include "torus_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ctrap;

namespace {

constexpr double kOrderTol = 0.35;
constexpr GridOffset kStudyOffset{0.81, 0.46};

int g_failures = 0;
std::vector<int> g_failed;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) {
    ++g_failures;
    g_failed.push_back(id);
  }
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double order_of(const std::function<double(double)>& q, double h0, int count) {
  const auto hs = h_sequence(h0, 1.5, count);
  std::vector<double> vals;
  for (double h : hs) vals.push_back(q(h));
  return observed_order(vals, hs).asymptotic;
}

// 1. Single-term corrected rules on s_k v.
void criterion1(const DirectWeights& dw) {
  bool pass = true;
  std::ostringstream os;
  for (int k = 0; k <= 2; ++k) {
    for (int p = 0; p <= 4; ++p) {
      const double o =
          order_of([&](double h) { return quad2d_single(k, p, h, kStudyOffset, dw); }, 0.25, 9);
      const int expect = p == 0 ? k + 1 : k + p + 1;
      const bool ok = std::abs(o - expect) <= kOrderTol;
      pass = pass && ok;
      os << "(" << k << "," << p << ")" << fmt("%.2f", o) << "/" << expect << (ok ? " " : "! ");
    }
  }
  report(1, "single-term orders k+p+1 (p=0: punctured k+1)", pass, os.str());
}

// 2. Composite rules on the general test function.
void criterion2(const DirectWeights& dw) {
  bool pass = true;
  std::ostringstream os;
  for (int p : {0, 2, 3, 4, 5}) {
    const double o =
        order_of([&](double h) { return quad2d_general(p, h, kStudyOffset, dw); }, 0.25, 9);
    const int expect = p == 0 ? 1 : p;
    const bool ok = std::abs(o - expect) <= kOrderTol;
    pass = pass && ok;
    os << "p=" << p << ":" << fmt("%.2f", o) << "/" << expect << (ok ? " " : "! ");
  }
  report(2, "composite U^p orders p (p=0: punctured 1)", pass, os.str());
}

// 3. Moment exactness of tabulated weights against the polar oracle.
bool exactness_at_lattice(const WeightTable& t, int m, int n, double& worst) {
  const Stencil& st = stencil_for_order(t.p);
  const double h = t.h_star_max;
  const double alpha = t.lattice(m), beta = t.lattice(n);
  const auto W = t.at(m, n);
  const BumpFunction& bump = t.options.bump;
  const double R = bump.support_radius;
  const int reach = int(std::ceil(R / h)) + 2;
  bool ok = true;
  for (int mode = 0; mode < t.cols(); ++mode) {
    for (int tf = 0; tf < st.size(); ++tf) {
      const Monomial& mono = st.monomials[tf];
      auto g = [&](double x, double y) {
        return bump(std::hypot(x, y)) * std::pow(x, mono.a) * std::pow(y, mono.b);
      };
      double lattice = 0;
      for (int i = -reach; i <= reach; ++i) {
        for (int j = -reach; j <= reach; ++j) {
          bool in_stencil = false;
          for (const auto& o : st.offsets) in_stencil = in_stencil || (o.x() == i && o.y() == j);
          if (in_stencil) continue;
          const double x = h * (i - alpha), y = h * (j - beta);
          const double r = std::hypot(x, y);
          if (r >= R) continue;
          lattice += std::pow(r, t.k - 1) * testing::angular_basis(mode, std::atan2(y, x)) * g(x, y);
        }
      }
      double corr = 0;
      for (int i = 0; i < st.size(); ++i) {
        corr += W(i, mode) * g(h * (st.offsets[i].x() - alpha), h * (st.offsets[i].y() - beta));
      }
      const double rule = h * h * lattice + std::pow(h, t.k + 1) * corr;
      const double exact = testing::polar_moment(t.k, mode, mono, bump);
      const double err = std::abs(rule - exact) / std::max(1.0, std::abs(exact));
      worst = std::max(worst, err / t.tol);
      ok = ok && err <= 10 * t.tol;
    }
  }
  return ok;
}

void criterion3(const std::vector<const WeightTable*>& tables) {
  std::mt19937_64 rng(3);
  bool pass = true;
  std::ostringstream os;
  for (const WeightTable* t : tables) {
    std::uniform_int_distribution<int> pick(0, t->resolution - 1);
    double worst = 0;
    bool ok = true;
    for (int s = 0; s < 10; ++s) ok = exactness_at_lattice(*t, pick(rng), pick(rng), worst) && ok;
    pass = pass && ok;
    os << "(" << t->k << "," << t->p << ",N" << t->N << ")" << fmt("%.1e", worst) << (ok ? " " : "! ");
  }
  report(3, "tabulated weights integrate s_k g_j within 10 Tol (worst err/Tol)", pass, os.str());
}

// 4. Punctured rule on |x|^j l and on the remainders.
void criterion4() {
  bool pass = true;
  std::ostringstream os;
  DirectWeights unused;
  for (int k = 0; k <= 2; ++k) {
    const double o =
        order_of([&](double h) { return quad2d_single(k, 0, h, kStudyOffset, unused); }, 0.25, 9);
    const bool ok = std::abs(o - (k + 1)) <= kOrderTol;
    pass = pass && ok;
    os << "j=" << k - 1 << ":" << fmt("%.2f", o) << "/" << k + 1 << (ok ? " " : "! ");
  }
  for (int q = 0; q <= 2; ++q) {
    const double o =
        order_of([&](double h) { return quad2d_remainder(q, h, kStudyOffset); }, 0.25, 9);
    const bool ok = std::abs(o - (q + 2)) <= kOrderTol;
    pass = pass && ok;
    os << "rem q=" << q << ":" << fmt("%.2f", o) << "/" << q + 2 << (ok ? " " : "! ");
  }
  report(4, "punctured orders j+2 and remainder orders q+2", pass, os.str());
}

// 5. Symmetric cancellation for an on-grid constant-profile singularity.
void criterion5(const DirectWeights& dw) {
  const SingularTerm term = make_singular_term(0, [](double) { return 1.0; });
  const double o = order_of(
      [&](double h) {
        const Grid2 grid = study_grid(h, {0.0, 0.0});
        return corrected_Qp(term, testfn::v, Eigen::Vector2d::Zero(), grid, 1, dw);
      },
      0.25, 9);
  report(5, "k=0, phi=1, on-grid Q^1 order 3", std::abs(o - 3) <= kOrderTol, fmt("order %.3f", o));
}

// 6. Expansion remainder on torus planes.
void criterion6(const Torus& torus) {
  const auto targets = random_torus_targets(torus, 5, 6);
  double min_slope = 1e9;
  for (const auto& tg : targets) {
    const SurfaceProbe probe = analytic_probe(torus, tg.point);
    const int axis = dominant_direction(probe.n);
    const Eigen::Vector3i ax = plane_axes(axis);
    const PrincipalFrame frame = build_frame(probe, axis);
    const CubicSurfaceModel model = cubic_model(probe);
    for (double eta : {-0.06, 0.0, 0.05}) {
      const KernelExpansion ex = expansion_at_plane(frame, model, eta);
      const Eigen::Vector3d y0 = tg.point + eta * probe.n;
      for (int kt = 0; kt < 3; ++kt) {
        const auto type = KernelType(kt);
        std::vector<double> radii, rem;
        // Below |y| ~ 1e-4 rounding in the DL numerator (x - y).n swamps the O(|y|) remainder.
        for (int j = 0; j < 6; ++j) {
          const double r = 1.6e-2 / std::pow(2.0, j);
          double worst = 0;
          for (int d = 0; d < 8; ++d) {
            const double a = 2 * std::numbers::pi * d / 8 + 0.1;
            const Eigen::Vector2d y = r * Eigen::Vector2d(std::cos(a), std::sin(a));
            Eigen::Vector3d p = y0;
            p(ax(0)) += y(0);
            p(ax(1)) += y(1);
            const Projection pr = torus.project(p);
            const double s = kernel_eval(type, tg.point, probe.n, pr.point, pr.normal);
            worst = std::max(worst, std::abs(s - ex.s0(type, y) - ex.s1(type, y)));
          }
          radii.push_back(r);
          rem.push_back(worst);
        }
        min_slope = std::min(min_slope, loglog_slope(radii, rem));
      }
    }
  }
  report(6, "|s - s0 - s1| slope >= 1 (5 targets x 3 heights x 8 directions)", min_slope >= 1.0,
         fmt("min slope %.4f", min_slope));
}

// 7. Grid-FD geometry against analytic values.
void criterion7(const Torus& torus) {
  const auto targets = random_torus_targets(torus, 5, 7);
  std::vector<double> hs, ek, ef;
  for (int j = 3; j >= 0; --j) {
    const double h = 4e-3 * std::pow(2.0, j);
    double worst_k = 0, worst_f = 0;
    for (const auto& tg : targets) {
      const SurfaceProbe a = analytic_probe(torus, tg.point);
      const SurfaceProbe f = fd_probe(torus, tg.point, h, 0.05);
      worst_k = std::max({worst_k, std::abs(a.kappa1 - f.kappa1), std::abs(a.kappa2 - f.kappa2)});
      const double sign = a.tau1.dot(f.tau1) >= 0 ? 1.0 : -1.0;
      worst_f = std::max(worst_f, (sign * f.f3 - a.f3).cwiseAbs().maxCoeff());
    }
    hs.push_back(h);
    ek.push_back(worst_k);
    ef.push_back(worst_f);
  }
  const double ok_k = loglog_slope(hs, ek), ok_f = loglog_slope(hs, ef);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  double cubic_err = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const double qxx = -0.8 + 0.3 * u(rng), qyy = 0.6 + 0.3 * u(rng);
    CubicGraph g(qxx, 0.0, qyy, u(rng), u(rng), u(rng), u(rng));
    const SurfaceProbe f = fd_probe(g, Eigen::Vector3d::Zero(), 1e-2, 0.05);
    const double sign = f.tau1.x() >= 0 ? 1.0 : -1.0;
    cubic_err = std::max(cubic_err, (sign * f.f3 - g.third()).cwiseAbs().maxCoeff());
  }
  const bool pass = ok_k >= 3 && ok_f >= 3 && cubic_err <= 1e-8;
  report(7, "FD curvature/f3 order >= 3; cubic-graph f3 within 1e-8 at h=1e-2", pass,
         fmt("kappa order %.2f", ok_k) + fmt(", f3 order %.2f", ok_f) +
             fmt(", cubic f3 err %.2e", cubic_err));
}

double box_width(const SurfaceHandle& s) {
  const AxisBox b = s.bounds();
  return (b.hi - b.lo).maxCoeff();
}

// 8 and 9. Torus self-convergence and agreement with the parametric oracle.
void criteria8_9(const Torus& torus, const WeightProvider& tables) {
  const double h0 = box_width(torus) / 24;
  const auto hs = h_sequence(h0, 1.5, 5);
  const auto targets = random_torus_targets(torus, 5, 8);
  const auto t0 = std::chrono::steady_clock::now();
  const Ibim3dStudy study = ibim3d_study(torus, torus.density_function(), targets, hs, tables);
  bool pass8 = true;
  std::ostringstream os;
  os << fmt("h0=%.4f", h0) << fmt(" href=%.5f", study.reference.h);
  for (int k = 0; k < 3; ++k) {
    const double o = study.mean_order(KernelType(k));
    pass8 = pass8 && o >= 3;
    os << " " << to_string(KernelType(k)) << fmt(" slope %.2f", o);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  os << fmt(" (%.0f s)", secs);
  report(8, "torus mean self-convergence order >= 3", pass8, os.str());

  // Fine level h = h_min against the oracle, tolerance 5x |V(h) - V(h/2)|, mean over targets.
  const auto rho_param = [&](double t, double p) { return torus.density(t, p); };
  const auto one_param = [](double, double) { return 1.0; };
  const Ibim3dLevel& fine = study.levels.back();
  const Ibim3dLevel& half = study.reference;
  const Ibim3dStudy ones = ibim3d_study(torus, [](const Eigen::Vector3d&) { return 1.0; }, targets,
                                        {fine.h}, tables);
  bool pass9 = true;
  std::ostringstream os9;
  os9 << fmt("h=%.5f", fine.h);
  for (int d = 0; d < 2; ++d) {
    const Ibim3dLevel& vf = d == 0 ? fine : ones.levels.back();
    const Ibim3dLevel& vh = d == 0 ? half : ones.reference;
    const auto& dens = d == 0 ? std::function<double(double, double)>(rho_param)
                              : std::function<double(double, double)>(one_param);
    for (int k = 0; k < 3; ++k) {
      double err = 0, self = 0;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        const double oracle = testing::torus_layer_potential(KernelType(k), torus, dens,
                                                             targets[i].theta, targets[i].phi);
        err += std::abs(vf.corrected[i][k] - oracle) / targets.size();
        self += std::abs(vf.corrected[i][k] - vh.corrected[i][k]) / targets.size();
      }
      const bool ok = err <= 5 * self;
      pass9 = pass9 && ok;
      os9 << " " << (d == 0 ? "rho" : "one") << "/" << to_string(KernelType(k))
          << fmt(" %.1e", err) << fmt("<=5x%.1e", self) << (ok ? "" : "!");
    }
  }
  report(9, "V3 vs 512x512-panel parametric oracle within 5x self-convergence error", pass9,
         os9.str());
}

// 10. Averaging kernel normalization.
void criterion10() {
  const auto rule = gauss_legendre<long double>(30);
  const double eps = 0.1;
  const long double mass = composite_gauss_legendre<long double>(
      [&](long double t) { return (long double)delta_eps(double(t), eps); }, -(long double)eps,
      (long double)eps, 200, rule);
  const double a = averaging_constant();
  const bool pass = std::abs(double(mass) - 1) <= 1e-10 && std::abs(a - 7.51393) <= 5e-5;
  report(10, "delta_eps unit mass and a = 7.51393", pass,
         fmt("|mass-1| %.1e", std::abs(double(mass) - 1)) + fmt(", a %.8f", a));
}

const WeightTable* ensure_table(int k, int p, int N, int resolution, const std::filesystem::path& dir,
                                std::vector<std::unique_ptr<WeightTable>>& store) {
  const auto path = weight_table_path(dir, k, p, N);
  if (std::filesystem::exists(path)) {
    try {
      auto t = std::make_unique<WeightTable>(load_weight_table(path));
      if (t->resolution == resolution) {
        store.push_back(std::move(t));
        return store.back().get();
      }
    } catch (const std::exception&) {
    }
  }
  std::filesystem::create_directories(dir);
  store.push_back(std::make_unique<WeightTable>(build_weight_table(k, p, N, resolution)));
  save_weight_table(*store.back(), path);
  return store.back().get();
}

}  // namespace

// --expect-fail=7,... lists criteria known to fail; the exit code is 0 only when the
// failing set matches that list exactly.
int main(int argc, char** argv) {
  std::vector<int> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const std::string key = "--expect-fail=";
    if (arg.rfind(key, 0) != 0) {
      std::fprintf(stderr, "usage: acceptance [--expect-fail=ID[,ID...]]\n");
      return 2;
    }
    std::stringstream ids(arg.substr(key.size()));
    for (std::string id; std::getline(ids, id, ',');) expected.push_back(std::stoi(id));
  }
  std::sort(expected.begin(), expected.end());
  const auto start = std::chrono::steady_clock::now();
  const auto cache = weight_cache_dir();
  const Torus torus(load_torus_fixture(default_torus_fixture()));
  DirectWeights dw;

  criterion10();
  criterion5(dw);
  criterion4();
  criterion1(dw);
  criterion2(dw);

  std::vector<std::unique_ptr<WeightTable>> store;
  std::vector<const WeightTable*> tables;
  TableWeights v3;
  for (auto [k, p] : {std::pair{0, 2}, std::pair{1, 1}}) {
    const WeightTable* t = ensure_table(k, p, 32, 33, cache, store);
    tables.push_back(t);
    v3.add(std::make_shared<WeightTable>(*t));
  }
  const auto small = cache / "acceptance";
  for (int k = 0; k <= 2; ++k) {
    for (int p = 1; p <= 4; ++p) tables.push_back(ensure_table(k, p, 4, 4, small, store));
  }
  criterion3(tables);

  criterion6(torus);
  criterion7(torus);
  criteria8_9(torus, v3);

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("acceptance: %d failing criteria, %.0f s\n", g_failures, secs);
  std::sort(g_failed.begin(), g_failed.end());
  if (!expected.empty()) {
    std::printf("acceptance: expected failures:");
    for (int id : expected) std::printf(" %d", id);
    std::printf(" (%s)\n", g_failed == expected ? "matched" : "MISMATCH");
    return g_failed == expected ? 0 : 1;
  }
  return g_failures == 0 ? 0 : 1;
}
