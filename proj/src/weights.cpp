#include "ctrap/weights.hpp"

#include "ctrap/version.hpp"

#include "json.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>

namespace ctrap {

namespace {

constexpr char kMagic[8] = {'C', 'T', 'R', 'A', 'P', 'W', 'T', '\0'};

template <class Scalar>
MomentCache<Scalar> make_cache(int k, int p, int N, const WeightOptions& opt) {
  const int deg = max_test_degree(p);
  return MomentCache<Scalar>(opt, k + deg + 1, N, deg);
}

template <class F>
decltype(auto) with_precision(Precision prec, F&& f) {
  switch (prec) {
    case Precision::Double:
      return f(double{});
    case Precision::Extended:
      return f((long double){});
    case Precision::Quad:
#if defined(CTRAP_HAVE_FLOAT128)
      return f(num::quad{});
#else
      return f((long double){});
#endif
  }
  throw std::logic_error("unknown precision");
}

// Cubic Lagrange weights on 4 consecutive lattice nodes; returns the first node index.
int lagrange4(double s, int resolution, double c[4]) {
  int i0 = int(std::floor(s)) - 1;
  i0 = std::clamp(i0, 0, resolution - 4);
  for (int a = 0; a < 4; ++a) {
    double v = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) v *= (s - double(i0 + b)) / double(a - b);
    }
    c[a] = v;
  }
  return i0;
}

nlohmann::json metadata(const WeightTable& t) {
  nlohmann::json j;
  j["format_version"] = WeightTable::kFormatVersion;
  j["library_version"] = kLibraryVersion;
  j["k"] = t.k;
  j["p"] = t.p;
  j["N"] = t.N;
  j["resolution"] = t.resolution;
  j["lattice_lo"] = t.lo;
  j["tol"] = t.tol;
  j["h_star_max"] = t.h_star_max;
  j["max_difference"] = t.max_difference;
  j["precision"] = to_string(t.precision);
  j["bump"] = {{"plateau_radius", t.options.bump.plateau_radius},
               {"support_radius", t.options.bump.support_radius},
               {"sharpness", t.options.bump.sharpness}};
  j["quadrature"] = {{"gl_nodes", t.options.gl_nodes},
                     {"gl_panels", t.options.gl_panels},
                     {"angular_samples", t.options.angular_samples},
                     {"j_min", t.options.j_min},
                     {"j_max", t.options.j_max}};
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& o : stencil_for_order(t.p).offsets) nodes.push_back({o.x(), o.y()});
  j["stencil"] = nodes;
  j["layout"] = "lattice (m alpha, n beta) row-major; per point p~ x (2N+1) column-major; modes const, cos1, sin1, ...";
  return j;
}

void from_metadata(const nlohmann::json& j, WeightTable& t) {
  t.k = j.at("k");
  t.p = j.at("p");
  t.N = j.at("N");
  t.resolution = j.at("resolution");
  t.lo = j.at("lattice_lo");
  t.tol = j.at("tol");
  t.h_star_max = j.at("h_star_max");
  t.max_difference = j.at("max_difference");
  t.precision = precision_from_string(j.at("precision"));
  t.options.bump.plateau_radius = j.at("bump").at("plateau_radius");
  t.options.bump.support_radius = j.at("bump").at("support_radius");
  t.options.bump.sharpness = j.at("bump").at("sharpness");
  const auto& q = j.at("quadrature");
  t.options.gl_nodes = q.at("gl_nodes");
  t.options.gl_panels = q.at("gl_panels");
  t.options.angular_samples = q.at("angular_samples");
  t.options.j_min = q.at("j_min");
  t.options.j_max = q.at("j_max");
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

}  // namespace

const char* to_string(Precision p) {
  switch (p) {
    case Precision::Double:
      return "double";
    case Precision::Extended:
      return "extended";
    case Precision::Quad:
      return "quad";
  }
  return "?";
}

Precision precision_from_string(const std::string& s) {
  if (s == "double") return Precision::Double;
  if (s == "extended") return Precision::Extended;
  if (s == "quad") return Precision::Quad;
  throw std::invalid_argument("unknown precision '" + s + "'");
}

bool quad_precision_available() {
#if defined(CTRAP_HAVE_FLOAT128)
  return true;
#else
  return false;
#endif
}

int max_test_degree(int p) {
  int d = 0;
  for (const auto& m : stencil_for_order(p).monomials) d = std::max(d, m.degree());
  return d;
}

Precision recommended_precision(int k, int p) {
  const int e = k + 1 + max_test_degree(p);
  if (e <= 3) return Precision::Double;
  return quad_precision_available() ? Precision::Quad : Precision::Extended;
}

WeightLimit compute_weights_limit(int k, int p, GridOffset offset, int N, double tol,
                                  Precision prec, const WeightOptions& opt) {
  return with_precision(prec, [&](auto tag) {
    using S = decltype(tag);
    const auto cache = make_cache<S>(k, p, N, opt);
    return weights_limit<S>(k, stencil_for_order(p), offset, cache, tol);
  });
}

WeightMatrix compute_weights_at_h(int k, int p, GridOffset offset, int N, double h, Precision prec,
                                  const WeightOptions& opt) {
  return with_precision(prec, [&](auto tag) {
    using S = decltype(tag);
    const auto cache = make_cache<S>(k, p, N, opt);
    return weights_at_h<S>(k, stencil_for_order(p), offset, S(h), cache);
  });
}

Eigen::VectorXd combine_modes(const WeightMatrix& per_mode, const FourierCoefficients& c) {
  return combine_modes(Eigen::MatrixXd(per_mode.cast<double>()), c);
}

Eigen::VectorXd combine_modes(const Eigen::MatrixXd& per_mode, const FourierCoefficients& c) {
  const int N = int((per_mode.cols() - 1) / 2);
  return per_mode * c.packed(N);
}

Eigen::MatrixXd WeightTable::per_mode(GridOffset offset) const {
  const double eps = 1e-12;
  if (offset.alpha < lo - eps || offset.alpha > lo + 1 + eps || offset.beta < lo - eps ||
      offset.beta > lo + 1 + eps) {
    throw std::out_of_range("WeightTable: offset outside the tabulated cell");
  }
  double ca[4], cb[4];
  const int ma = lagrange4((offset.alpha - lo) / spacing(), resolution, ca);
  const int nb = lagrange4((offset.beta - lo) / spacing(), resolution, cb);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), cols());
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double c = ca[a] * cb[b];
      if (c != 0.0) out += c * at(ma + a, nb + b);
    }
  }
  return out;
}

WeightTable build_weight_table(int k, int p, int N, int resolution, double tol,
                               const WeightOptions& opt, const BuildProgress& progress) {
  if (N < 1) throw std::invalid_argument("build_weight_table: N must be >= 1");
  if (resolution < 4) throw std::invalid_argument("build_weight_table: resolution must be >= 4");
  WeightTable t;
  t.k = k;
  t.p = p;
  t.N = N;
  t.resolution = resolution;
  t.lo = (p == 1) ? -0.5 : 0.0;
  t.tol = tol > 0 ? tol : default_tolerance(p);
  t.options = opt;
  t.precision = recommended_precision(k, p);
  t.data.assign(std::size_t(resolution) * resolution * t.block(), 0.0);
  const int total = resolution * resolution;
  with_precision(t.precision, [&](auto tag) {
    using S = decltype(tag);
    const auto cache = make_cache<S>(k, p, N, opt);
    const Stencil& st = stencil_for_order(p);
    for (int m = 0; m < resolution; ++m) {
      for (int n = 0; n < resolution; ++n) {
        const GridOffset off{t.lattice(m), t.lattice(n)};
        WeightLimit wl;
        try {
          wl = weights_limit<S>(k, st, off, cache, t.tol);
        } catch (const std::exception& e) {
          throw std::runtime_error(std::string(e.what()) + " at lattice point (" +
                                   std::to_string(off.alpha) + ", " + std::to_string(off.beta) +
                                   ")");
        }
        t.at(m, n) = wl.weights.cast<double>();
        t.h_star_max = std::max(t.h_star_max, wl.h_star);
        t.max_difference = std::max(t.max_difference, wl.last_difference);
        if (progress) progress(m * resolution + n + 1, total);
      }
    }
    return 0;
  });
  return t;
}

InterpolatedWeights interpolate_weights(const WeightTable& table, const SingularTerm& term,
                                        GridOffset offset) {
  if (term.k != table.k) {
    throw std::invalid_argument("interpolate_weights: table is for k = " + std::to_string(table.k) +
                                ", term has k = " + std::to_string(term.k));
  }
  InterpolatedWeights out;
  out.weights = table.per_mode(offset) * term.coeffs.packed(table.N);
  out.tail_ratio = term.coeffs.tail_ratio(table.N);
  out.tail_warning = out.tail_ratio > 1e-10;
  return out;
}

void save_weight_table(const WeightTable& table, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  const std::string meta = metadata(table).dump();
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t header[2] = {to_little(std::uint64_t(WeightTable::kFormatVersion)),
                                   to_little(std::uint64_t(meta.size()))};
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(meta.data(), std::streamsize(meta.size()));
  for (double v : table.data) {
    std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw std::runtime_error("short write to " + file.string());
  auto sidecar = file;
  sidecar += ".json";
  std::ofstream js(sidecar);
  js << metadata(table).dump(2) << "\n";
}

WeightTable load_weight_table(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open weight table " + file.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw std::runtime_error(file.string() + " is not a weight table");
  }
  std::uint64_t header[2];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  const auto version = to_little(header[0]);
  if (version != std::uint64_t(WeightTable::kFormatVersion)) {
    throw std::runtime_error(file.string() + ": table format version " + std::to_string(version) +
                             " does not match " + std::to_string(WeightTable::kFormatVersion) +
                             "; rebuild it with `ctrap weights build`");
  }
  std::string meta(to_little(header[1]), '\0');
  in.read(meta.data(), std::streamsize(meta.size()));
  WeightTable t;
  from_metadata(nlohmann::json::parse(meta), t);
  t.data.resize(std::size_t(t.resolution) * t.resolution * t.block());
  for (double& v : t.data) {
    std::uint64_t bits;
    in.read(reinterpret_cast<char*>(&bits), sizeof bits);
    v = std::bit_cast<double>(to_little(bits));
  }
  if (!in) throw std::runtime_error(file.string() + ": truncated table data");
  return t;
}

std::filesystem::path weight_cache_dir(const std::optional<std::filesystem::path>& dir) {
  if (dir) return *dir;
  if (const char* env = std::getenv("CTRAP_CACHE_DIR"); env && *env) return env;
  return "ctrap_cache";
}

std::filesystem::path weight_table_path(const std::filesystem::path& dir, int k, int p, int N) {
  return dir / ("weights_k" + std::to_string(k) + "_p" + std::to_string(p) + "_N" +
                std::to_string(N) + ".ctw");
}

}  // namespace ctrap
