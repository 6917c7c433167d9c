#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

namespace giniseq {

// Neumaier-compensated accumulator. All sums over observations go through
// this so results are permutation-stable at the 1e-12 level.
class KahanSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

// Standard-normal quantile Phi^{-1}(p), |error| well below 1e-9.
double normal_quantile(double p);

// z_{alpha/2}: the 100(1-alpha/2)th percentile of N(0,1).
double z_half_alpha(double alpha);

// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

// Quantile of Gamma(shape, scale=1) by inverting P(a, x).
double gamma_quantile(double shape, double p);

// splitmix64 finalizer; used to derive independent rng substreams.
std::uint64_t mix64(std::uint64_t x);

}  // namespace giniseq
