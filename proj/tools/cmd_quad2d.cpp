#include "commands.hpp"
#include "output.hpp"

#include "ctrap/quadrature.hpp"
#include "ctrap/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <set>

namespace ctrap::cli {
namespace {

struct Quad2dArgs {
  std::string study = "all";
  std::vector<int> k{0, 1, 2};
  std::vector<int> p;
  double h0 = 0.25;
  double ratio = 1.5;
  int count = 9;
  double alpha = 0.81;
  double beta = 0.46;
  std::string weights = "direct";
  int modes = 32;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out;
};

struct Series {
  std::string study;
  int k = -1;  // -1: not applicable
  int p = 0;   // 0: punctured baseline
  std::string method;
  int expected = 0;
  std::function<double(double)> eval;
};

void run(const Common& c, const Quad2dArgs& a) {
  const bool sk = a.study == "all" || a.study == "sk";
  const bool gen = a.study == "all" || a.study == "general";
  const GridOffset off{a.alpha, a.beta};

  std::vector<int> p_sk, p_gen;
  for (int p : a.p.empty() ? std::vector<int>{1, 2, 3, 4} : a.p) {
    if (p >= 1 && p <= 4) p_sk.push_back(p);
  }
  for (int p : a.p.empty() ? std::vector<int>{2, 3, 4, 5} : a.p) {
    if (p >= 2 && p <= 5) p_gen.push_back(p);
  }

  std::unique_ptr<WeightProvider> provider;
  if (a.weights == "table") {
    std::set<std::pair<int, int>> need;
    if (sk) {
      for (int k : a.k) {
        for (int p : p_sk) need.insert({k, p});
      }
    }
    if (gen) {
      for (int p : p_gen) {
        for (int j = 0; j <= p - 2; ++j) need.insert({j, p - 1 - j});
      }
    }
    provider = std::make_unique<TableWeights>(load_table_weights(
        {need.begin(), need.end()}, a.modes, weight_cache_dir(c.cache_dir)));
  } else {
    provider = std::make_unique<DirectWeights>();
  }
  const WeightProvider& w = *provider;

  std::vector<Series> series;
  if (sk) {
    for (int k : a.k) {
      series.push_back({"sk", k, 0, "punctured", k + 1,
                        [&w, k, off](double h) { return quad2d_single(k, 0, h, off, w); }});
      for (int p : p_sk) {
        series.push_back({"sk", k, p, "corrected", k + p + 1,
                          [&w, k, p, off](double h) { return quad2d_single(k, p, h, off, w); }});
      }
    }
  }
  if (gen) {
    series.push_back({"general", -1, 0, "punctured", 1,
                      [&w, off](double h) { return quad2d_general(0, h, off, w); }});
    for (int p : p_gen) {
      series.push_back({"general", -1, p, "composite", p,
                        [&w, p, off](double h) { return quad2d_general(p, h, off, w); }});
    }
  }

  const nlohmann::json config = {{"command", "quad2d run"}, {"study", a.study},   {"k", a.k},
                                 {"p", a.p},                {"h0", a.h0},         {"ratio", a.ratio},
                                 {"count", a.count},        {"alpha", a.alpha},   {"beta", a.beta},
                                 {"weights", a.weights},    {"modes", a.modes},   {"seed", a.seed}};
  ResultTable table({"study", "k", "p", "method", "h", "value", "difference", "order"}, config);
  nlohmann::json summary = nlohmann::json::array();
  const auto hs = h_sequence(a.h0, a.ratio, a.count);
  for (const Series& s : series) {
    std::vector<double> vals;
    for (double h : hs) vals.push_back(s.eval(h));
    const OrderEstimate est = observed_order(vals, hs);
    const std::string k = s.k < 0 ? "" : std::to_string(s.k);
    for (int i = 0; i < a.count; ++i) {
      const std::string diff = i > 0 ? format_double(est.differences[i - 1]) : "";
      const std::string ord = i > 1 ? format_double(est.local_orders[i - 2]) : "";
      table.add({s.study, k, std::to_string(s.p), s.method, format_double(hs[i]),
                 format_double(vals[i]), diff, ord});
    }
    summary.push_back({{"study", s.study}, {"k", s.k < 0 ? nlohmann::json() : nlohmann::json(s.k)},
                       {"p", s.p}, {"method", s.method}, {"expected_order", s.expected},
                       {"observed_order", est.asymptotic}, {"slope", est.slope}});
    std::fprintf(stderr, "%-8s k=%-2s p=%d %-10s observed order %6.3f (expected %d)\n",
                 s.study.c_str(), k.c_str(), s.p, s.method.c_str(), est.asymptotic, s.expected);
  }
  table.set_summary(summary);
  table.emit(a.out);
}

}  // namespace

void add_quad2d_command(CLI::App& app, const Common& common) {
  auto* q = app.add_subcommand("quad2d", "2D convergence studies of the corrected rules");
  q->require_subcommand(1);
  q->fallthrough();
  auto a = std::make_shared<Quad2dArgs>();
  auto* r = q->add_subcommand("run", "Run single-term and composite studies on an h sequence");
  r->add_option("--study", a->study, "sk, general or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"sk", "general", "all"}));
  r->add_option("--k", a->k, "Singular term degrees for the single-term study")
      ->capture_default_str()
      ->check(CLI::Range(0, 2));
  r->add_option("--p", a->p, "Orders (default 1..4 single-term, 2..5 composite)")
      ->check(CLI::Range(1, 5));
  r->add_option("--h0", a->h0, "Coarsest h")->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--ratio", a->ratio, "Refinement ratio (> 1)")
      ->capture_default_str()
      ->check(CLI::Range(1.0 + 1e-9, 10.0));
  r->add_option("--count", a->count, "Number of grid sizes (>= 3)")
      ->capture_default_str()
      ->check(CLI::Range(3, 40));
  r->add_option("--alpha", a->alpha, "Singular point offset alpha in its cell")->capture_default_str();
  r->add_option("--beta", a->beta, "Singular point offset beta in its cell")->capture_default_str();
  r->add_option("--weights", a->weights, "direct (solve per offset) or table (cached tables)")
      ->capture_default_str()
      ->check(CLI::IsMember({"direct", "table"}));
  r->add_option("--modes", a->modes, "Fourier modes of the cached tables")->capture_default_str();
  r->add_option("--seed", a->seed, "Recorded in the output; the 2D studies draw no random numbers")
      ->capture_default_str();
  r->add_option("--out", a->out, "Output prefix: writes PREFIX.csv and PREFIX.json (default: CSV on stdout)");
  r->fallthrough();
  r->callback([&common, a] { run(common, *a); });
}

}  // namespace ctrap::cli
