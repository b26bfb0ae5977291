#include "ctrap/singular_term.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctrap {

double FourierCoefficients::operator()(double psi) const {
  double v = a0;
  for (int j = 1; j <= modes(); ++j) {
    v += a(j - 1) * std::cos(j * psi) + b(j - 1) * std::sin(j * psi);
  }
  return v;
}

Eigen::VectorXd FourierCoefficients::packed(int n) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * n + 1);
  c(0) = a0;
  for (int j = 1; j <= std::min(n, modes()); ++j) {
    c(2 * j - 1) = a(j - 1);
    c(2 * j) = b(j - 1);
  }
  return c;
}

double FourierCoefficients::tail_ratio(int n) const {
  double total = 2 * a0 * a0, tail = 0;
  for (int j = 1; j <= modes(); ++j) {
    const double e = a(j - 1) * a(j - 1) + b(j - 1) * b(j - 1);
    total += e;
    if (j > n) tail += e;
  }
  return total > 0 ? std::sqrt(tail / total) : 0.0;
}

FourierCoefficients fourier_coefficients(const Eigen::VectorXd& samples) {
  const long n = samples.size();
  if (n < 4 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fourier_coefficients: sample count must be a power of two >= 4");
  }
  Eigen::FFT<double> fft;
  std::vector<double> in(samples.data(), samples.data() + n);
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  FourierCoefficients c;
  const int half = int(n / 2);
  c.a0 = out[0].real() / double(n);
  c.a.resize(half);
  c.b.resize(half);
  for (int j = 1; j <= half; ++j) {
    const double scale = (j == half) ? 1.0 / double(n) : 2.0 / double(n);
    c.a(j - 1) = scale * out[j].real();
    c.b(j - 1) = (j == half) ? 0.0 : -scale * out[j].imag();
  }
  return c;
}

double SingularTerm::phi_at(double psi) const { return phi ? phi(psi) : coeffs(psi); }

double SingularTerm::operator()(const Eigen::Vector2d& x) const {
  const double r = x.norm();
  return std::pow(r, k - 1) * phi_at(std::atan2(x.y(), x.x()));
}

SingularTerm make_singular_term(int k, std::function<double(double)> phi, int samples) {
  if (k < 0) throw std::invalid_argument("make_singular_term: k must be nonnegative");
  SingularTerm t;
  t.k = k;
  t.samples.resize(samples);
  for (int m = 0; m < samples; ++m) {
    t.samples(m) = phi(2 * std::numbers::pi * m / samples);
  }
  t.coeffs = fourier_coefficients(t.samples);
  t.phi = std::move(phi);
  return t;
}

SingularTerm make_singular_term(int k, const FourierCoefficients& coeffs, int samples) {
  SingularTerm t;
  t.k = k;
  t.coeffs = coeffs;
  t.samples.resize(samples);
  for (int m = 0; m < samples; ++m) t.samples(m) = coeffs(2 * std::numbers::pi * m / samples);
  return t;
}

double SingularFunction::remainder(const Eigen::Vector2d& x, int q) const {
  if (q + 1 > int(terms.size())) throw std::out_of_range("SingularFunction: not enough terms");
  double r = full(x);
  for (int i = 0; i <= q; ++i) r -= terms[i](x);
  return r;
}

}  // namespace ctrap
