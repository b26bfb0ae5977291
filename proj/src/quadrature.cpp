#include "ctrap/quadrature.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctrap {

int significant_modes(const FourierCoefficients& c, double rel_tol) {
  double scale = std::abs(c.a0);
  for (int j = 0; j < c.modes(); ++j) scale = std::max({scale, std::abs(c.a(j)), std::abs(c.b(j))});
  int n = 1;
  for (int j = 1; j <= c.modes(); ++j) {
    if (std::abs(c.a(j - 1)) + std::abs(c.b(j - 1)) > rel_tol * scale) n = j;
  }
  return n;
}

DirectWeights::DirectWeights(double tol, Precision floor, WeightOptions opt)
    : tol_(tol), floor_(floor), opt_(opt) {}

const WeightMatrix& DirectWeights::per_mode(int k, int p, GridOffset offset, int N) const {
  const auto key = std::make_tuple(k, p, offset.alpha, offset.beta, N);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  const Precision prec = std::max(floor_, recommended_precision(k, p));
  const double tol = p >= 4 ? std::max(tol_, 1e-10) : tol_;
  WeightLimit wl = compute_weights_limit(k, p, offset, N, tol, prec, opt_);
  std::lock_guard<std::mutex> lock(mutex_);
  return memo_.emplace(key, std::move(wl.weights)).first->second;
}

Eigen::VectorXd DirectWeights::weights(const SingularTerm& term, int p, GridOffset offset) const {
  const int N = significant_modes(term.coeffs);
  return combine_modes(per_mode(term.k, p, offset, N), term.coeffs);
}

void TableWeights::add(std::shared_ptr<const WeightTable> table) {
  tables_[{table->k, table->p}] = std::move(table);
}

bool TableWeights::has(int k, int p) const { return tables_.count({k, p}) > 0; }

const WeightTable& TableWeights::table(int k, int p) const {
  auto it = tables_.find({k, p});
  if (it == tables_.end()) {
    throw std::out_of_range("no weight table for (k, p) = (" + std::to_string(k) + ", " +
                            std::to_string(p) + ")");
  }
  return *it->second;
}

Eigen::VectorXd TableWeights::weights(const SingularTerm& term, int p, GridOffset offset) const {
  return interpolate_weights(table(term.k, p), term, offset).weights;
}

TableWeights load_table_weights(const std::vector<std::pair<int, int>>& kp, int N,
                                const std::filesystem::path& dir) {
  TableWeights tw;
  for (const auto& [k, p] : kp) {
    const auto path = weight_table_path(dir, k, p, N);
    const std::string build = "ctrap weights build --k " + std::to_string(k) + " --p " +
                              std::to_string(p) + " --modes " + std::to_string(N) +
                              " --cache-dir " + dir.string();
    if (!std::filesystem::exists(path)) {
      throw std::runtime_error("missing weight table " + path.string() + "; build it with: " + build);
    }
    try {
      tw.add(std::make_shared<WeightTable>(load_weight_table(path)));
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(e.what()) + "; rebuild it with: " + build);
    }
  }
  return tw;
}

}  // namespace ctrap
