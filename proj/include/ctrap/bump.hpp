#pragma once

#include "ctrap/precision.hpp"

#include <stdexcept>

namespace ctrap {

/// Radial plateau bump: 1 on [0, r0], 0 on [R, inf), C-infinity monotone blend in between.
///
/// With t = (r - r0) / (R - r0) and q = sharpness the blend is
/// 1 / (1 + exp((1-t)^-q - t^-q)); every derivative vanishes at both ends.
/// All partial derivatives of g(|x|) vanish at the origin because of the plateau.
struct BumpFunction {
  double plateau_radius = 0.25;
  double support_radius = 1.0;
  int sharpness = 2;

  template <class Scalar>
  Scalar operator()(Scalar r) const {
    const Scalar r0 = Scalar(plateau_radius);
    const Scalar R = Scalar(support_radius);
    if (r <= r0) return Scalar(1);
    if (r >= R) return Scalar(0);
    const Scalar t = (r - r0) / (R - r0);
    const Scalar z = num::ipow(Scalar(1) - t, -sharpness) - num::ipow(t, -sharpness);
    if (z > Scalar(700)) return Scalar(0);
    return Scalar(1) / (Scalar(1) + num::exp(z));
  }
};

inline double bump_eval(double r, const BumpFunction& b) {
  if (r < 0) throw std::invalid_argument("bump_eval: r must be nonnegative");
  return b(r);
}

}  // namespace ctrap
