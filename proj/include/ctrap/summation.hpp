#pragma once

namespace ctrap {

/// Compensated (Kahan–Babuska/Neumaier) accumulator.
template <class Scalar = double>
class KahanSum {
public:
  KahanSum() = default;
  explicit KahanSum(Scalar init) : sum_(init) {}

  KahanSum& operator+=(Scalar x) {
    const Scalar t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  Scalar value() const { return sum_ + comp_; }

private:
  Scalar sum_{0};
  Scalar comp_{0};
};

}  // namespace ctrap
