#pragma once

#include <cmath>
#include <functional>

namespace critlab {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int levels = 0;
  bool converged = false;
};

/// Double-exponential (tanh-sinh) rule on [a, b]. The integrand receives the
/// abscissa together with its distances to both endpoints, so functions with
/// endpoint singularities can be evaluated without cancellation.
inline QuadratureResult tanh_sinh(const std::function<double(double, double, double)>& f, double a, double b,
                                  double rel_tol = 1e-12, int max_levels = 12) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double pi2 = 0.5 * M_PI;
  auto node = [&](double t, double& weight) {
    // returns u = distance from the nearer endpoint scaled to [0, 2]
    const double s = pi2 * std::sinh(t);
    const double c = std::cosh(s);
    weight = pi2 * std::cosh(t) / (c * c);
    return 1.0 / (std::exp(2.0 * s) + 1.0);  // (1 - tanh s) / 2
  };
  auto eval_pair = [&](double t) {
    double w;
    const double frac = node(t, w);  // fractional distance from the right endpoint for +t
    const double d = 2.0 * half * frac;
    if (d <= 0.0) return 0.0;
    const double right = f(b - d, 2.0 * half - d, d);
    const double left = f(a + d, d, 2.0 * half - d);
    return w * (left + right);
  };
  double h = 1.0;
  double sum = f(mid, half, half) * pi2;
  const double t_max = 4.0;
  for (double t = h; t <= t_max; t += h) sum += eval_pair(t);
  double estimate = sum * h * half;
  QuadratureResult res;
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += eval_pair(t);
    const double next = sum * h * half;
    res.error = std::abs(next - estimate);
    res.value = next;
    res.levels = level;
    estimate = next;
    if (level >= 3 && res.error <= rel_tol * std::abs(next)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace critlab
