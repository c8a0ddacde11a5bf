#include "critlab/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "critlab/quadrature.hpp"
#include "critlab/special.hpp"

namespace critlab {

using std::numbers::pi;

namespace {

// -log cos x = sum_k c_k x^{2k}, c_k = 2^{2k-1}(2^{2k}-1)|B_2k| / (k (2k)!)
constexpr int kSeriesTerms = 10;

const std::array<double, kSeriesTerms>& log_cos_coefficients() {
  static const std::array<double, kSeriesTerms> c = [] {
    const double bernoulli[kSeriesTerms] = {1.0 / 6,     1.0 / 30,        1.0 / 42,      1.0 / 30,
                                            5.0 / 66,    691.0 / 2730,    7.0 / 6,       3617.0 / 510,
                                            43867.0 / 798, 174611.0 / 330};
    std::array<double, kSeriesTerms> out{};
    for (int k = 1; k <= kSeriesTerms; ++k)
      out[static_cast<std::size_t>(k - 1)] =
          std::ldexp(1.0, 2 * k - 1) * (std::ldexp(1.0, 2 * k) - 1.0) * bernoulli[k - 1] / (k * factorial(2 * k));
    return out;
  }();
  return c;
}

}  // namespace

CloitreEval cloitre(double t, double alpha, double eps) {
  if (!(alpha > 0.5)) throw std::invalid_argument("Cloitre product needs alpha_range > 1/2");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  CloitreEval r;
  r.alpha_range = alpha;
  r.t = t;
  const double at = std::abs(t);
  if (at == 0.0) {
    r.value = 1.0;
    return r;
  }
  // explicit factors until every remaining argument is below 0.1
  long J = std::max(1L, static_cast<long>(std::ceil(std::pow(10.0 * at, 1.0 / alpha))));
  auto remainder = [&](long j) {
    const int order = 2 * kSeriesTerms + 2;
    return 1.02 * std::pow(at, order) * hurwitz_zeta(order * alpha, static_cast<double>(j + 1));
  };
  while (remainder(J) > eps && J < (1L << 40)) J *= 2;

  CompensatedSum<> log_sum;
  int sign = 1;
  for (long j = 1; j <= J; ++j) {
    const double c = std::cos(at * std::pow(static_cast<double>(j), -alpha));
    const double ac = std::abs(c);
    if (ac < 1e-300) {
      r.exact_zero = true;
      r.j_max = j;
      r.value = 0.0;
      r.log_abs = -std::numeric_limits<double>::infinity();
      return r;
    }
    if (c < 0) sign = -sign;
    log_sum.add(std::log(ac));
  }
  const auto& coef = log_cos_coefficients();
  for (int k = 1; k <= kSeriesTerms; ++k)
    log_sum.add(-coef[static_cast<std::size_t>(k - 1)] * std::pow(at, 2 * k) *
                hurwitz_zeta(2.0 * k * alpha, static_cast<double>(J + 1)));
  r.j_max = J;
  r.sign = sign;
  r.log_abs = log_sum.value();
  r.value = sign * std::exp(r.log_abs);
  r.tail_bound = remainder(J) + 1e-15 * std::max(1.0, std::abs(r.log_abs));
  return r;
}

DecayConstants decay_constant(double alpha, int intervals) {
  if (!(alpha > 0.5)) throw std::invalid_argument("decay constant needs alpha_range > 1/2");
  if (intervals < 2) throw std::invalid_argument("need at least two intervals");
  DecayConstants d;
  d.alpha_range = alpha;
  d.intervals = intervals;
  const double p = -1.0 - 1.0 / alpha;
  CompensatedSum<> total;
  double err = 0.0;
  // [0, pi/2]: -log cos is evaluated from the distance to the zero of cos
  auto first = [&](double x, double, double db) {
    const double s = std::sin(0.5 * x);
    const double mlc = x < 0.5 ? -std::log1p(-2.0 * s * s) : -std::log(std::sin(db));
    return mlc * std::pow(x, p);
  };
  auto r0 = tanh_sinh(first, 0.0, 0.5 * pi, 1e-12, 9);
  total.add(r0.value);
  err += r0.error;
  d.worst_interval_error = r0.error;
  // [(2m-1)pi/2, (2m+1)pi/2]: |cos x| = sin(distance to the nearer zero)
  for (int m = 1; m < intervals; ++m) {
    // split at the maximum of |cos| so each half has one singular endpoint
    auto gl = [&](double x, double da, double) { return -std::log(std::sin(da)) * std::pow(x, p); };
    auto gr = [&](double x, double, double db) { return -std::log(std::sin(db)) * std::pow(x, p); };
    const double a = (2.0 * m - 1.0) * 0.5 * pi, b = (2.0 * m + 1.0) * 0.5 * pi;
    auto lhs = tanh_sinh(gl, a, 0.5 * (a + b), 1e-12, 9);
    auto rhs = tanh_sinh(gr, 0.5 * (a + b), b, 1e-12, 9);
    total.add(lhs.value);
    total.add(rhs.value);
    const double e = lhs.error + rhs.error;
    err += e;
    d.worst_interval_error = std::max(d.worst_interval_error, e);
  }
  // tail from the Fourier series of -log|cos|, integrated by parts
  const double X = (2.0 * intervals - 1.0) * 0.5 * pi;
  const double tail = std::log(2.0) * alpha * std::pow(X, -1.0 / alpha) +
                      hurwitz_zeta(3.0, 1.0) / 4.0 * (1.0 + 1.0 / alpha) * std::pow(X, -2.0 - 1.0 / alpha);
  total.add(tail);
  err += (1.0 + 1.0 / alpha) * (2.0 + 1.0 / alpha) * (3.0 + 1.0 / alpha) * std::pow(X, -4.0 - 1.0 / alpha);
  d.C = total.value() / alpha;
  d.C_error = err / alpha;
  d.converged = d.C_error <= 1e-8 * d.C;
  if (!d.converged)
    throw std::runtime_error("quadrature did not reach 1e-8 relative accuracy (worst interval error " +
                             std::to_string(d.worst_interval_error) + ")");
  return d;
}

std::vector<double> log_grid(double a, double b, int points) {
  if (!(a > 0.0) || !(b > a) || points < 2) throw std::invalid_argument("log grid needs 0 < a < b and >= 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = a * std::pow(b / a, static_cast<double>(i) / (points - 1));
  return g;
}

AsymptoticFit cloitre_asymptotics(double alpha, double t_min, double t_max, int points) {
  AsymptoticFit f;
  f.alpha_range = alpha;
  f.t_min = t_min;
  f.t_max = t_max;
  f.C = decay_constant(alpha).C;
  std::vector<double> x, y, ts, logs;
  for (double t : log_grid(t_min, t_max, points)) {
    const auto c = cloitre(t, alpha);
    if (c.exact_zero) continue;
    ts.push_back(t);
    logs.push_back(c.log_abs);
    x.push_back(std::pow(t, 1.0 / alpha));
    y.push_back(-c.log_abs);
  }
  f.points = static_cast<int>(x.size());
  const LineFit lf = fit_line(x, y);
  f.slope = lf.slope;
  f.intercept = lf.intercept;
  f.slope_error = lf.slope_error;
  f.relative_deviation = std::abs(f.slope - f.C) / f.C;
  const std::size_t half = ts.size() / 2;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double ratio = std::abs(logs[i] + f.C * x[i]) / std::pow(ts[i], 1.0 / (alpha + 1.0));
    f.K = std::max(f.K, ratio);
    (i < half ? f.K_first_half : f.K_second_half) = std::max(i < half ? f.K_first_half : f.K_second_half, ratio);
  }
  return f;
}

DecaySeries magnetization_decay(double p, double alpha, double J, const std::vector<double>& t_grid, double fit_t_min,
                                double fit_t_max) {
  if (!(alpha > 1.0)) throw std::invalid_argument("magnetization decay needs alpha_range > 1");
  if (p * p > 1.0) throw std::invalid_argument("initial magnetization needs p^2 <= 1");
  DecaySeries s;
  s.fit_t_min = fit_t_min;
  s.fit_t_max = fit_t_max;
  std::vector<double> lx, ly;
  for (double t : t_grid) {
    const auto c = cloitre(2.0 * J * t, alpha);
    const double m = c.exact_zero ? 0.0 : p * std::exp(4.0 * c.log_abs);
    s.t.push_back(t);
    s.m1.push_back(m);
    if (p != 0.0 && !c.exact_zero && t >= fit_t_min && t <= fit_t_max && c.log_abs < 0.0) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(-4.0 * c.log_abs));
    }
  }
  s.fit_points = static_cast<int>(lx.size());
  if (lx.size() >= 3) {
    const LineFit f = fit_line(lx, ly);
    s.exponent = f.slope;
    s.exponent_error = f.slope_error;
    s.intercept = f.intercept;
  }
  return s;
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 field(const MeanFieldState& s, const Vec3& M, double sign) {
  return {sign * 2.0 * (s.b - s.c) * M[1] * M[2], sign * 2.0 * (s.c - s.a) * M[0] * M[2],
          sign * 2.0 * (s.a - s.b) * M[0] * M[1]};
}

Vec3 rk4_step(const MeanFieldState& s, const Vec3& M, double dt, double sign) {
  auto add = [](const Vec3& x, const Vec3& k, double h) { return Vec3{x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]}; };
  const Vec3 k1 = field(s, M, sign);
  const Vec3 k2 = field(s, add(M, k1, 0.5 * dt), sign);
  const Vec3 k3 = field(s, add(M, k2, 0.5 * dt), sign);
  const Vec3 k4 = field(s, add(M, k3, dt), sign);
  Vec3 out;
  for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = M[static_cast<std::size_t>(i)] + dt / 6.0 * (k1[static_cast<std::size_t>(i)] + 2.0 * k2[static_cast<std::size_t>(i)] + 2.0 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
  return out;
}

double norm2(const Vec3& M) { return M[0] * M[0] + M[1] * M[1] + M[2] * M[2]; }

void check_state(const MeanFieldState& s, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (norm2(s.M) > 1.0 + 1e-12) throw std::invalid_argument("initial state needs |M| <= 1");
}

}  // namespace

Trajectory meanfield_integrate(const MeanFieldState& s0, double t_end, double dt, int record_every) {
  check_state(s0, dt);
  if (record_every < 1) record_every = 1;
  const long steps = std::lround((t_end - s0.t) / dt);
  Trajectory tr;
  Vec3 M = s0.M;
  const double c0 = norm2(M);
  auto record = [&](long i) {
    tr.t.push_back(s0.t + static_cast<double>(i) * dt);
    tr.M.push_back(M);
    tr.casimir_drift.push_back(norm2(M) - c0);
  };
  record(0);
  for (long i = 1; i <= steps; ++i) {
    M = rk4_step(s0, M, dt, 1.0);
    tr.max_casimir_drift = std::max(tr.max_casimir_drift, std::abs(norm2(M) - c0));
    for (int k = 0; k < 3; ++k)
      tr.max_deviation = std::max(tr.max_deviation, std::abs(M[static_cast<std::size_t>(k)] - s0.M[static_cast<std::size_t>(k)]));
    if (i % record_every == 0 || i == steps) record(i);
  }
  return tr;
}

double meanfield_reversal_error(const MeanFieldState& s0, double t_end, double dt) {
  check_state(s0, dt);
  const long steps = std::lround((t_end - s0.t) / dt);
  Vec3 M = s0.M;
  for (long i = 0; i < steps; ++i) M = rk4_step(s0, M, dt, 1.0);
  for (long i = 0; i < steps; ++i) M = rk4_step(s0, M, dt, -1.0);
  double e = 0.0;
  for (int k = 0; k < 3; ++k) e = std::max(e, std::abs(M[static_cast<std::size_t>(k)] - s0.M[static_cast<std::size_t>(k)]));
  return e;
}

DropletFit droplet_scaling(double alpha, const std::vector<int>& sizes, double J) {
  if (sizes.size() < 2) throw std::invalid_argument("need at least two droplet sizes");
  DropletFit f;
  f.alpha_range = alpha;
  f.sizes = sizes;
  f.expected = 2.0 - alpha;
  std::vector<double> lx, ly;
  for (int n : sizes) {
    if (n < 1) throw std::invalid_argument("droplet size must be positive");
    const auto spec = LatticeSpec::cubic(1, 4 * n, Boundary::periodic);
    const Hamiltonian h(spec, Coupling::dyson(J, alpha));
    SpinConfiguration c = SpinConfiguration::all_up(spec);
    const double e0 = h.energy(c);
    for (int x = 0; x < n; ++x) c.flip(x);
    const double de = h.energy(c) - e0;
    f.energy.push_back(de);
    lx.push_back(std::log(n));
    ly.push_back(std::log(de));
  }
  const LineFit raw = fit_line(lx, ly);
  f.raw_slope = raw.slope;
  f.raw_intercept = raw.intercept;
  // E(N) = A N^{2-alpha} + B: the short-bond constant B cancels in E(rN) - E(N)
  const double ratio = static_cast<double>(sizes[1]) / sizes[0];
  bool geometric = sizes.size() >= 3 && ratio > 1.0;
  for (std::size_t i = 1; i < sizes.size() && geometric; ++i)
    geometric = std::abs(static_cast<double>(sizes[i]) / sizes[i - 1] - ratio) < 1e-12;
  if (geometric) {
    std::vector<double> dx, dy;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
      dx.push_back(lx[i]);
      dy.push_back(std::log(f.energy[i + 1] - f.energy[i]));
    }
    const LineFit d = fit_line(dx, dy);
    f.slope = d.slope;
    f.slope_error = d.slope_error;
    f.differenced = true;
  } else {
    f.slope = raw.slope;
    f.slope_error = raw.slope_error;
  }
  f.relative_deviation = std::abs(f.slope - f.expected) / f.expected;
  return f;
}

}  // namespace critlab
