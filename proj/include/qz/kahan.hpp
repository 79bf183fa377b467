#pragma once

namespace qz {

/// Compensated (Kahan) accumulator. Keeps long summations reproducible and
/// accurate independent of magnitude spread; the accumulation order is up
/// to the caller.
class KahanSum {
public:
  void add(double value) {
    const double y = value - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

} // namespace qz
