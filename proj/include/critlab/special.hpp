#pragma once

#include <cmath>
#include <span>

namespace critlab {

/// Hurwitz zeta  sum_{k>=0} (k + a)^{-s}  for s > 1, a > 0 (Euler-Maclaurin).
double hurwitz_zeta(double s, double a);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution.
inline double chi_square_sf(double statistic, double dof) { return gamma_q(0.5 * dof, 0.5 * statistic); }

/// log(sum exp(v)) without overflow.
double log_sum_exp(std::span<const double> v);

/// Neumaier-compensated running sum.
template <typename Scalar = double>
class CompensatedSum {
 public:
  void add(Scalar x) {
    Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

double binomial(int n, int k);
double factorial(int n);

}  // namespace critlab
