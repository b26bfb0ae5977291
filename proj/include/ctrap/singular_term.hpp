#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace ctrap {

/// Real Fourier coefficients of a periodic function on [0, 2pi):
/// phi(psi) = a0 + sum_j a(j) cos(j psi) + b(j) sin(j psi), j = 1..modes().
struct FourierCoefficients {
  double a0 = 0.0;
  Eigen::VectorXd a;  // a(j-1) multiplies cos(j psi)
  Eigen::VectorXd b;

  int modes() const { return int(a.size()); }
  double operator()(double psi) const;
  /// Coefficient vector in mode order (const, cos 1, sin 1, cos 2, sin 2, ...), truncated to n modes.
  Eigen::VectorXd packed(int n) const;
  /// sqrt of the energy carried by modes above n, relative to the total.
  double tail_ratio(int n) const;
};

/// Coefficients from uniform samples phi(2 pi m / n), n a power of two >= 4.
FourierCoefficients fourier_coefficients(const Eigen::VectorXd& samples);

/// s_k(x) = |x|^(k-1) phi(x/|x|).
struct SingularTerm {
  int k = 0;
  Eigen::VectorXd samples;
  FourierCoefficients coeffs;
  /// Exact angular profile when known; otherwise the Fourier series is used.
  std::function<double(double)> phi;

  double phi_at(double psi) const;
  double operator()(const Eigen::Vector2d& x) const;
};

/// Samples phi on `samples` uniform angles and caches its Fourier coefficients.
SingularTerm make_singular_term(int k, std::function<double(double)> phi, int samples = 4096);

/// Term from Fourier coefficients alone (phi evaluated by the series).
SingularTerm make_singular_term(int k, const FourierCoefficients& coeffs, int samples = 4096);

/// s with its leading expansion terms s_0..s_q; the remainder is full - sum of terms.
struct SingularFunction {
  std::vector<SingularTerm> terms;
  std::function<double(const Eigen::Vector2d&)> full;

  double remainder(const Eigen::Vector2d& x, int q) const;
};

}  // namespace ctrap
