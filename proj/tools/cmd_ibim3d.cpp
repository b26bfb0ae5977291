#include "commands.hpp"
#include "output.hpp"

#include "ctrap/quadrature.hpp"
#include "ctrap/study.hpp"

#include <chrono>
#include <cstdio>
#include <memory>

namespace ctrap::cli {
namespace {

struct Ibim3dArgs {
  double h0 = 0.0;  // 0: bounding box width / 24
  double ratio = 1.5;
  int count = 4;
  int targets = 5;
  std::uint64_t seed = 20240917;
  double eps = 0.1;
  std::vector<std::string> kernels{"SL", "DL", "DLC"};
  bool punctured = false;
  std::string jacobian = "fd";
  std::string weights = "table";
  int modes = 32;
  std::optional<std::filesystem::path> fixture;
  std::optional<std::filesystem::path> out;
};

void run(const Common& c, const Ibim3dArgs& a) {
  const auto fixture = a.fixture.value_or(default_torus_fixture());
  const Torus torus(load_torus_fixture(fixture));
  const AxisBox box = torus.bounds();
  const double h0 = a.h0 > 0 ? a.h0 : (box.hi - box.lo).maxCoeff() / 24;
  const auto hs = h_sequence(h0, a.ratio, a.count);
  const auto targets = random_torus_targets(torus, a.targets, a.seed);

  std::unique_ptr<WeightProvider> provider;
  if (a.weights == "table") {
    provider = std::make_unique<TableWeights>(
        load_table_weights({{0, 2}, {1, 1}}, a.modes, weight_cache_dir(c.cache_dir)));
  } else {
    provider = std::make_unique<DirectWeights>();
  }

  Ibim3dOptions opt;
  opt.eps = a.eps;
  opt.jacobian = a.jacobian == "analytic" ? JacobianSource::Analytic : JacobianSource::FiniteDifference;
  opt.punctured = a.punctured;
  const auto t0 = std::chrono::steady_clock::now();
  const Ibim3dStudy study = ibim3d_study(
      torus, torus.density_function(), targets, hs, *provider, opt, [&](const Ibim3dLevel& l) {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::fprintf(stderr, "  h = %.5f: %zu tube nodes (%.0f s)\n", l.h, l.nodes, secs);
      });

  nlohmann::json config = {{"command", "ibim3d run"}, {"h0", h0},           {"ratio", a.ratio},
                           {"count", a.count},        {"targets", a.targets}, {"seed", a.seed},
                           {"eps", a.eps},            {"kernel", a.kernels}, {"punctured", a.punctured},
                           {"jacobian", a.jacobian},  {"weights", a.weights}, {"modes", a.modes},
                           {"fixture", fixture.filename().string()}};
  ResultTable table({"level", "h", "nodes", "target", "theta", "phi", "kernel", "method", "value",
                     "error"},
                    config);
  std::vector<std::pair<std::string, bool>> methods{{"V3", false}};
  if (a.punctured) methods.push_back({"punctured", true});

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& name : a.kernels) {
    const KernelType type = kernel_from_string(name);
    const int kt = int(type);
    for (const auto& [method, punct] : methods) {
      const auto errs = study.errors(type, punct);
      const auto mean = study.mean_errors(type, punct);
      for (std::size_t l = 0; l <= study.levels.size(); ++l) {
        const bool ref = l == study.levels.size();
        const Ibim3dLevel& lev = ref ? study.reference : study.levels[l];
        const std::string level = ref ? "ref" : std::to_string(l);
        for (std::size_t i = 0; i < targets.size(); ++i) {
          const double v = punct ? lev.punctured[i][kt] : lev.corrected[i][kt];
          table.add({level, format_double(lev.h), std::to_string(lev.nodes), std::to_string(i),
                     format_double(targets[i].theta), format_double(targets[i].phi),
                     to_string(type), method, format_double(v),
                     ref ? "" : format_double(errs[l][i])});
        }
        if (!ref) {
          table.add({level, format_double(lev.h), std::to_string(lev.nodes), "mean", "", "",
                     to_string(type), method, "", format_double(mean[l])});
        }
      }
      const double order = study.mean_order(type, punct);
      summary.push_back({{"kernel", to_string(type)}, {"method", method},
                         {"mean_errors", mean}, {"mean_order", order}});
      std::fprintf(stderr, "%-3s %-9s mean self-convergence order %.3f\n", to_string(type),
                   method.c_str(), order);
    }
  }
  table.set_summary(summary);
  table.emit(a.out);
}

}  // namespace

void add_ibim3d_command(CLI::App& app, const Common& common) {
  auto* q = app.add_subcommand("ibim3d", "Layer potentials on the test torus with the V3 rule");
  q->require_subcommand(1);
  q->fallthrough();
  auto a = std::make_shared<Ibim3dArgs>();
  auto* r = q->add_subcommand("run", "Self-convergence study against the h_min / 2 reference");
  r->add_option("--h0", a->h0, "Coarsest h (default: bounding box width / 24)")
      ->check(CLI::PositiveNumber);
  r->add_option("--ratio", a->ratio, "Refinement ratio (> 1)")
      ->capture_default_str()
      ->check(CLI::Range(1.0 + 1e-9, 10.0));
  r->add_option("--count", a->count, "Number of grid sizes (>= 3)")
      ->capture_default_str()
      ->check(CLI::Range(3, 20));
  r->add_option("--targets", a->targets, "Random target points on the torus")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  r->add_option("--seed", a->seed, "Seed of the target sampler")->capture_default_str();
  r->add_option("--eps", a->eps, "Tube half-width (must stay below the reach 0.2)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  r->add_option("--kernel", a->kernels, "Kernels to report: SL, DL, DLC")
      ->capture_default_str()
      ->check(CLI::IsMember({"SL", "DL", "DLC"}));
  r->add_flag("--punctured", a->punctured, "Also report the punctured baseline");
  r->add_option("--jacobian", a->jacobian, "fd (FD4 of the closest point map) or analytic")
      ->capture_default_str()
      ->check(CLI::IsMember({"fd", "analytic"}));
  r->add_option("--weights", a->weights, "table (cached k=0,p=2 and k=1,p=1 tables) or direct")
      ->capture_default_str()
      ->check(CLI::IsMember({"table", "direct"}));
  r->add_option("--modes", a->modes, "Fourier modes of the cached tables")->capture_default_str();
  r->add_option("--fixture", a->fixture, "Torus fixture JSON (default: shipped fixture)")
      ->check(CLI::ExistingFile);
  r->add_option("--out", a->out, "Output prefix: writes PREFIX.csv and PREFIX.json (default: CSV on stdout)");
  r->fallthrough();
  r->callback([&common, a] { run(common, *a); });
}

}  // namespace ctrap::cli
