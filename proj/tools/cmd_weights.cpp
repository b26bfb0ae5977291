#include "commands.hpp"

#include "ctrap/weights.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <random>
#include <stdexcept>

namespace ctrap::cli {
namespace {

struct WeightsArgs {
  int k = 0;
  int p = 2;
  int modes = 32;
  int resolution = 33;
  double tol = -1.0;
  std::uint64_t seed = 1;
  int samples = 10;
};

void add_table_options(CLI::App& sub, WeightsArgs& a) {
  sub.add_option("--k", a.k, "Singular term degree k")->required()->check(CLI::Range(0, 8));
  sub.add_option("--p", a.p, "Correction order p")->required()->check(CLI::Range(1, 4));
  sub.add_option("--modes", a.modes, "Fourier modes N")->capture_default_str()->check(CLI::PositiveNumber);
}

std::filesystem::path table_path(const Common& c, const WeightsArgs& a) {
  return weight_table_path(weight_cache_dir(c.cache_dir), a.k, a.p, a.modes);
}

WeightTable load_or_explain(const Common& c, const WeightsArgs& a) {
  const auto path = table_path(c, a);
  if (!std::filesystem::exists(path)) {
    throw std::runtime_error("missing weight table " + path.string() +
                             "; build it with: ctrap weights build --k " + std::to_string(a.k) +
                             " --p " + std::to_string(a.p) + " --modes " + std::to_string(a.modes) +
                             " --cache-dir " + weight_cache_dir(c.cache_dir).string());
  }
  return load_weight_table(path);
}

void build(const Common& c, const WeightsArgs& a) {
  const auto path = table_path(c, a);
  int last = -1;
  const WeightTable t = build_weight_table(
      a.k, a.p, a.modes, a.resolution, a.tol, {}, [&](int done, int total) {
        const int pct = 100 * done / total;
        if (pct / 10 != last) {
          last = pct / 10;
          std::cerr << "  " << done << "/" << total << " lattice points\n";
        }
      });
  save_weight_table(t, path);
  std::printf("built %s (Tol %.1e, h* %.3g, max |diff| %.2e)\n", path.string().c_str(), t.tol,
              t.h_star_max, t.max_difference);
}

void verify(const Common& c, const WeightsArgs& a) {
  const WeightTable t = load_or_explain(c, a);
  std::mt19937_64 rng(a.seed);
  std::uniform_int_distribution<int> pick(0, t.resolution - 1);
  double worst = 0;
  for (int s = 0; s < a.samples; ++s) {
    const int m = pick(rng), n = pick(rng);
    const GridOffset off{t.lattice(m), t.lattice(n)};
    const WeightLimit lim = compute_weights_limit(t.k, t.p, off, t.N, t.tol, t.precision, t.options);
    const double diff = (lim.weights.cast<double>() - t.at(m, n)).cwiseAbs().maxCoeff();
    worst = std::max(worst, diff);
    std::printf("  (alpha, beta) = (%.4f, %.4f): max |diff| %.3e\n", off.alpha, off.beta, diff);
  }
  const bool ok = worst <= 10 * t.tol;
  std::printf("%s: worst %.3e vs 10 Tol = %.1e\n", ok ? "PASS" : "FAIL", worst, 10 * t.tol);
  if (!ok) throw std::runtime_error("weight table verification failed");
}

void info(const Common& c, const WeightsArgs& a) {
  const WeightTable t = load_or_explain(c, a);
  std::printf("file        %s\n", table_path(c, a).string().c_str());
  std::printf("k           %d\n", t.k);
  std::printf("p           %d (%d stencil nodes)\n", t.p, t.rows());
  std::printf("N           %d (%d angular basis functions)\n", t.N, t.cols());
  std::printf("lattice     %d x %d over [%g, %g]^2\n", t.resolution, t.resolution, t.lo, t.lo + 1);
  std::printf("Tol         %.1e\n", t.tol);
  std::printf("h*          %.6g (coarsest over the lattice)\n", t.h_star_max);
  std::printf("max |diff|  %.3e\n", t.max_difference);
  std::printf("precision   %s\n", to_string(t.precision));
  std::printf("version     %d\n", WeightTable::kFormatVersion);
}

}  // namespace

void add_weights_commands(CLI::App& app, const Common& common) {
  auto* w = app.add_subcommand("weights", "Build, verify or inspect correction weight tables");
  w->require_subcommand(1);
  w->fallthrough();
  auto args = std::make_shared<WeightsArgs>();

  auto* b = w->add_subcommand("build", "Tabulate weights over the (alpha, beta) lattice");
  add_table_options(*b, *args);
  b->add_option("--resolution", args->resolution, "Lattice points per axis")
      ->capture_default_str()
      ->check(CLI::Range(4, 257));
  b->add_option("--tol", args->tol, "h -> 0 tolerance (default 1e-8, 1e-4 for p = 4)");
  b->fallthrough();
  b->callback([&common, args] { build(common, *args); });

  auto* v = w->add_subcommand("verify", "Recompute random lattice entries and compare within 10 Tol");
  add_table_options(*v, *args);
  v->add_option("--seed", args->seed, "Seed for the sampled entries")->capture_default_str();
  v->add_option("--count", args->samples, "Entries to recompute")->capture_default_str()->check(CLI::PositiveNumber);
  v->fallthrough();
  v->callback([&common, args] { verify(common, *args); });

  auto* i = w->add_subcommand("info", "Print table metadata");
  add_table_options(*i, *args);
  i->fallthrough();
  i->callback([&common, args] { info(common, *args); });
}

}  // namespace ctrap::cli
