#include "critlab/charfunc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "critlab/special.hpp"
#include "critlab/stats.hpp"

namespace critlab {

using std::numbers::pi;
using cd = std::complex<double>;

std::vector<GeneratingPoint> generating_profile(const ExactMoments& exact, const std::vector<double>& z_grid) {
  std::vector<GeneratingPoint> out;
  out.reserve(z_grid.size());
  for (double z : z_grid) out.push_back({z, exact_generating(exact, z).real()});
  return out;
}

std::vector<GeneratingPoint> generating_profile(const LatticeSpec& spec, const Coupling& coupling, double beta,
                                                const std::vector<double>& z_grid) {
  return generating_profile(enumerate(spec, coupling, beta), z_grid);
}

std::complex<double> characteristic_function(const ExactMoments& exact, double t) {
  return exact_generating(exact, cd(0.0, t));
}

namespace {

// j-th derivative of sum_k c_k w^k
cd poly_derivative(const std::vector<double>& c, cd w, int j) {
  cd s = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= j; --k) {
    double f = c[static_cast<std::size_t>(k)];
    for (int i = 0; i < j; ++i) f *= k - i;
    s = s * w + f;
  }
  return s;
}

double poly_scale(const std::vector<double>& c, cd w, int j) {
  double s = 0.0, p = 1.0;
  const double r = std::abs(w);
  for (int k = j; k < static_cast<int>(c.size()); ++k) {
    double f = std::abs(c[static_cast<std::size_t>(k)]);
    for (int i = 0; i < j; ++i) f *= k - i;
    s += f * p;
    p *= r;
  }
  return s;
}

cd newton(const std::vector<double>& c, cd w, int j, int iterations) {
  for (int it = 0; it < iterations; ++it) {
    const cd f = poly_derivative(c, w, j), d = poly_derivative(c, w, j + 1);
    if (std::abs(d) == 0.0) break;
    const cd step = f / d;
    w -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(w))) break;
  }
  return w;
}

double angle_gap(cd a, cd b) {
  double d = std::abs(std::arg(a) - std::arg(b));
  return std::min(d, 2.0 * pi - d);
}

ZeroSet zeros_from_coefficients(const std::vector<double>& c, int periods) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) throw std::invalid_argument("field polynomial has no roots");
  if (periods < 1) throw std::invalid_argument("periods must be positive");
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(n)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("companion eigenvalue solver did not converge");
  std::vector<cd> raw(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(raw.begin(), raw.end(), [](cd a, cd b) { return std::arg(a) < std::arg(b); });

  // Group eigenvalues that scatter around a multiple root. A cluster of m is
  // accepted when its centroid, polished on the (m-1)-th derivative, annihilates
  // all lower derivatives; otherwise its members are polished one by one.
  std::vector<std::vector<cd>> clusters;
  for (cd w : raw) {
    if (!clusters.empty() && angle_gap(clusters.back().back(), w) < 0.25)
      clusters.back().push_back(w);
    else
      clusters.push_back({w});
  }
  if (clusters.size() > 1 && angle_gap(clusters.front().front(), clusters.back().back()) < 0.25) {
    clusters.front().insert(clusters.front().end(), clusters.back().begin(), clusters.back().end());
    clusters.pop_back();
  }

  ZeroSet zs;
  zs.volume = n;
  zs.periods = periods;
  auto accept = [&](cd w, int m) {
    zs.roots.push_back(w);
    zs.multiplicity.push_back(m);
    zs.root_residuals.push_back(std::abs(poly_derivative(c, w, 0)) / poly_scale(c, w, 0));
  };
  for (const auto& cl : clusters) {
    const int m = static_cast<int>(cl.size());
    bool merged = false;
    if (m > 1) {
      cd mu = 0.0;
      for (cd w : cl) mu += w;
      mu = newton(c, mu / static_cast<double>(m), m - 1, 50);
      merged = true;
      for (int j = 0; j < m - 1 && merged; ++j)
        if (std::abs(poly_derivative(c, mu, j)) > 1e-9 * poly_scale(c, mu, j)) merged = false;
      if (merged) accept(mu, m);
    }
    if (!merged)
      for (cd w : cl) accept(newton(c, w, 0, 100), 1);
  }

  for (std::size_t i = 0; i < zs.roots.size(); ++i) {
    const cd w = zs.roots[i];
    zs.circle_deviation = std::max(zs.circle_deviation, std::abs(std::abs(w) - 1.0));
    if (zs.root_residuals[i] > 1e-8 && zs.multiplicity[i] == 1)
      throw std::runtime_error("root polishing did not converge (residual " + std::to_string(zs.root_residuals[i]) + ")");
    double theta = std::arg(w);
    if (theta <= 0.0) theta += 2.0 * pi;
    for (int k = 0; k < zs.multiplicity[i]; ++k) zs.base.push_back(0.5 * theta);
  }
  if (zs.circle_deviation > kUnitCircleTolerance)
    throw std::runtime_error("Lee-Yang root off the unit circle by " + std::to_string(zs.circle_deviation));
  std::sort(zs.base.begin(), zs.base.end());
  for (double u : zs.base)
    for (int m = 0; m < periods; ++m) zs.t.push_back(u + pi * m);
  std::sort(zs.t.begin(), zs.t.end());
  zs.tail_bound = zs.tail_power_sum(1);
  return zs;
}

}  // namespace

double ZeroSet::power_sum(int k) const {
  double s = 0.0;
  for (double u : base) s += hurwitz_zeta(2.0 * k, u / pi);
  return s * std::pow(pi, -2.0 * k);
}

double ZeroSet::tail_power_sum(int k) const {
  double s = 0.0;
  for (double u : base) s += hurwitz_zeta(2.0 * k, u / pi + periods);
  return s * std::pow(pi, -2.0 * k);
}

double ZeroSet::cumulant(int order) const {
  if (order < 2 || order % 2) return 0.0;
  const int k = order / 2;
  const double sign = k % 2 ? 1.0 : -1.0;
  return factorial(order) * sign / k * power_sum(k);
}

double ZeroSet::truncated_product(double z) const {
  double log_p = 0.0;
  for (double tj : t) log_p += std::log1p(z * z / (tj * tj));
  return std::exp(log_p);
}

double ZeroSet::product(double z) const {
  // log(1 + x) = sum (-1)^{k+1} x^k / k with x = z^2/t^2 < 1 on the tail
  double log_tail = 0.0;
  const double z2 = z * z;
  double zk = 1.0;
  for (int k = 1; k <= 60; ++k) {
    zk *= z2;
    const double term = (k % 2 ? 1.0 : -1.0) * zk / k * tail_power_sum(k);
    log_tail += term;
    if (std::abs(term) < 1e-18) break;
  }
  return truncated_product(z) * std::exp(log_tail);
}

ZeroSet lee_yang_zeros(const ExactMoments& exact, int periods) {
  if (exact.volume() > kMaxZeroVolume)
    throw LatticeError("volume " + std::to_string(exact.volume()) + " exceeds the Lee-Yang limit of " +
                       std::to_string(kMaxZeroVolume));
  // sum_M P(M) e^{zM} = e^{-zN} sum_k P(2k-N) w^k with w = e^{2z}
  return zeros_from_coefficients(exact.total_spin_distribution, periods);
}

ZeroSet lee_yang_zeros(const LatticeSpec& spec, const Coupling& coupling, double beta, int periods) {
  if (spec.volume() > kMaxZeroVolume)
    throw LatticeError("volume " + std::to_string(spec.volume()) + " exceeds the Lee-Yang limit of " +
                       std::to_string(kMaxZeroVolume));
  return lee_yang_zeros(enumerate(spec, coupling, beta), periods);
}

ZeroSet single_site_zeros(int periods) { return zeros_from_coefficients({0.5, 0.5}, periods); }

std::vector<double> exact_total_spin_cumulants(const ExactMoments& exact) {
  const auto m = exact.total_spin_moments(8);
  const auto k = moments_to_cumulants(m);
  return {k[2], k[4], k[6], k[8]};
}

DcgReport dcg_identities(const ZeroSet& zeros, const ExactMoments& exact, double tolerance, double nonzero_threshold) {
  if (static_cast<int>(zeros.base.size()) != exact.volume())
    throw std::invalid_argument("zero set is incomplete: expected one ladder per site");
  DcgReport r;
  r.k_total = zeros.k_total();
  r.k_positive = r.k_total > 0.0;
  r.moment_cumulants = exact_total_spin_cumulants(exact);
  r.signs_alternate = true;
  r.all_nonzero = true;
  for (int i = 0; i < 4; ++i) {
    const double zc = zeros.cumulant(2 * i + 2);
    const double mc = r.moment_cumulants[static_cast<std::size_t>(i)];
    r.zero_cumulants.push_back(zc);
    const double scale = std::max(std::abs(zc), std::abs(mc));
    if (scale > 0.0) r.max_relative_mismatch = std::max(r.max_relative_mismatch, std::abs(zc - mc) / scale);
    if ((zc > 0.0) != (i % 2 == 0)) r.signs_alternate = false;
    if (std::abs(zc) <= nonzero_threshold) r.all_nonzero = false;
  }
  r.pass = r.k_positive && r.signs_alternate && r.all_nonzero && r.max_relative_mismatch <= tolerance;
  return r;
}

SchwarzReport schwarz_chain_check(const std::vector<std::vector<double>>& cumulant_sets, double tolerance) {
  if (cumulant_sets.size() < 3) throw std::invalid_argument("schwarz chain needs at least 3 volumes");
  SchwarzReport rep;
  rep.pass = true;
  for (const auto& u : cumulant_sets) {
    if (u.size() < 4) throw std::invalid_argument("need U_2..U_8 per volume");
    SchwarzCase sc;
    // U_{2k} = (2k)! (-1)^{k+1}/k S_{2k} and M_j = 2 S_{2j+2}
    for (int j = 0; j < 4; ++j) {
      const int k = j + 1;
      const double sign = k % 2 ? 1.0 : -1.0;
      sc.measure_moments.push_back(2.0 * u[static_cast<std::size_t>(j)] * k * sign / factorial(2 * k));
    }
    const auto& M = sc.measure_moments;
    for (int r = 2; r <= 3; ++r) {
      const double lhs = M[static_cast<std::size_t>(r - 1)] * M[static_cast<std::size_t>(r - 1)];
      const double rhs = M[static_cast<std::size_t>(r)] * M[static_cast<std::size_t>(r - 2)];
      const double excess = rhs != 0.0 ? (lhs - rhs) / std::abs(rhs) : lhs;
      sc.worst_log_convex = r == 2 ? excess : std::max(sc.worst_log_convex, excess);
      if (excess > tolerance) sc.log_convex = false;
    }
    // as printed: |M_{r-1}| <= sqrt(M_r) sqrt(M_{2r-2}), only r = 2 is in range
    sc.literal_form = std::abs(M[1]) <= std::sqrt(std::abs(M[2] * M[2])) * (1.0 + tolerance);
    rep.pass = rep.pass && sc.log_convex;
    rep.volumes.push_back(std::move(sc));
  }
  return rep;
}

}  // namespace critlab
