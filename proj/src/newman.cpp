#include "critlab/newman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "critlab/special.hpp"

namespace critlab {

namespace {

void check_family(std::size_t count, const std::vector<int>& sizes) {
  if (count == 0 || count != sizes.size()) throw std::invalid_argument("one linear size per volume required");
}

}  // namespace

ProfileSeries profile_estimate(const std::vector<ExactMoments>& volumes, const std::vector<int>& sizes,
                               const std::vector<double>& z_grid) {
  check_family(volumes.size(), sizes);
  ProfileSeries p;
  p.source = "exact";
  p.sizes = sizes;
  p.z = z_grid;
  for (const auto& ex : volumes) {
    const double n = ex.volume();
    if (ex.volume() > kMaxEnumerationVolume) throw std::invalid_argument("exact profiles need |Lambda| <= 24");
    p.volumes.push_back(ex.volume());
    std::vector<double> f, fn;
    for (double z : z_grid) {
      f.push_back(exact_log_generating(ex, z) / n);
      fn.push_back(exact_log_generating(ex, -z) / n);
    }
    p.f.push_back(std::move(f));
    p.f_neg.push_back(std::move(fn));
    p.f_error.emplace_back(z_grid.size(), 0.0);
    p.truncation.emplace_back(z_grid.size(), 0.0);
    p.reliable.emplace_back(z_grid.size(), true);
  }
  return p;
}

ProfileSeries profile_estimate(const std::vector<std::vector<double>>& samples, const std::vector<int>& sizes,
                               const std::vector<long>& volumes, const std::vector<double>& z_grid, int blocks) {
  check_family(samples.size(), sizes);
  if (volumes.size() != sizes.size()) throw std::invalid_argument("one volume per size required");
  ProfileSeries p;
  p.source = "mc";
  p.sizes = sizes;
  p.volumes = volumes;
  p.z = z_grid;
  const std::size_t nz = z_grid.size();
  for (std::size_t v = 0; v < samples.size(); ++v) {
    const auto& s = samples[v];
    if (s.size() < 10) throw std::invalid_argument("too few samples for a profile");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(s.size()), 4);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (int k = 0; k < 4; ++k) m(static_cast<Eigen::Index>(i), k) = std::pow(s[i], k + 1);
    const double vol = static_cast<double>(volumes[v]);
    // f(+-z) through fourth order in the cumulants, then the size of the quartic term
    auto eval = [&](const Eigen::VectorXd& raw) {
      const std::vector<double> mm{1.0, raw(0), raw(1), raw(2), raw(3)};
      const auto k = moments_to_cumulants(mm);
      Eigen::VectorXd out(static_cast<Eigen::Index>(3 * nz + 1));
      for (std::size_t i = 0; i < nz; ++i) {
        const double z = z_grid[i];
        const double even = k[2] * z * z / 2.0 + k[4] * std::pow(z, 4) / 24.0;
        const double odd = k[1] * z + k[3] * std::pow(z, 3) / 6.0;
        out(static_cast<Eigen::Index>(i)) = (even + odd) / vol;
        out(static_cast<Eigen::Index>(nz + i)) = (even - odd) / vol;
        out(static_cast<Eigen::Index>(2 * nz + i)) = std::abs(k[4]) * std::pow(z, 4) / 24.0 / vol;
      }
      out(static_cast<Eigen::Index>(3 * nz)) = k[2];
      return out;
    };
    const JackknifeSet js = JackknifeSet::from_samples(m, blocks).apply(eval);
    const Eigen::VectorXd err = js.error();
    const double sd = std::sqrt(std::max(0.0, js.mean(static_cast<Eigen::Index>(3 * nz))));
    const double limit = 2.0 * std::log(static_cast<double>(s.size()));
    std::vector<double> f(nz), fn(nz), fe(nz), tr(nz);
    std::vector<bool> rel(nz);
    for (std::size_t i = 0; i < nz; ++i) {
      f[i] = js.mean(static_cast<Eigen::Index>(i));
      fn[i] = js.mean(static_cast<Eigen::Index>(nz + i));
      fe[i] = err(static_cast<Eigen::Index>(i));
      tr[i] = js.mean(static_cast<Eigen::Index>(2 * nz + i));
      rel[i] = std::abs(z_grid[i]) * sd <= limit;
    }
    p.f.push_back(std::move(f));
    p.f_neg.push_back(std::move(fn));
    p.f_error.push_back(std::move(fe));
    p.truncation.push_back(std::move(tr));
    p.reliable.push_back(std::move(rel));
  }
  return p;
}

ProfileChecks profile_checks(const ProfileSeries& p, double tol) {
  ProfileChecks c;
  std::vector<std::size_t> order(p.z.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p.z[a] < p.z[b]; });
  for (std::size_t v = 0; v < p.f.size(); ++v) {
    const auto& f = p.f[v];
    for (std::size_t i = 0; i < p.z.size(); ++i) {
      const double slack = tol + 3.0 * p.f_error[v][i];
      if (p.z[i] == 0.0 && std::abs(f[i]) > tol) c.zero_at_origin = false;
      const double asym = std::abs(f[i] - p.f_neg[v][i]);
      c.worst_asymmetry = std::max(c.worst_asymmetry, asym);
      if (asym > slack + 3.0 * p.f_error[v][i]) c.symmetric = false;
    }
    for (std::size_t k = 1; k + 1 < order.size(); ++k) {
      const std::size_t a = order[k - 1], b = order[k], d = order[k + 1];
      const double z1 = p.z[a], z2 = p.z[b], z3 = p.z[d];
      if (z2 <= z1 || z3 <= z2) continue;
      const double second = 2.0 * ((f[d] - f[b]) / (z3 - z2) - (f[b] - f[a]) / (z2 - z1)) / (z3 - z1);
      const double noise = 4.0 * (p.f_error[v][a] + 2.0 * p.f_error[v][b] + p.f_error[v][d]) /
                           std::min(z2 - z1, z3 - z2) / (z3 - z1);
      c.worst_convexity = std::min(c.worst_convexity, second);
      if (second < -tol - 3.0 * noise) c.convex = false;
    }
  }
  // nested volumes, smallest first
  std::vector<std::size_t> vol(p.f.size());
  for (std::size_t i = 0; i < vol.size(); ++i) vol[i] = i;
  std::sort(vol.begin(), vol.end(), [&](std::size_t a, std::size_t b) { return p.volumes[a] < p.volumes[b]; });
  for (std::size_t k = 1; k < vol.size(); ++k)
    for (std::size_t i = 0; i < p.z.size(); ++i) {
      const double excess = p.f[vol[k - 1]][i] - p.f[vol[k]][i];
      c.worst_monotonicity = std::max(c.worst_monotonicity, excess);
      if (excess > tol + 3.0 * (p.f_error[vol[k - 1]][i] + p.f_error[vol[k]][i])) c.monotone_in_volume = false;
    }
  return c;
}

VarianceSeries exact_variance_series(const std::vector<ExactMoments>& volumes, const std::vector<int>& sizes) {
  check_family(volumes.size(), sizes);
  VarianceSeries v;
  v.sizes = sizes;
  for (const auto& ex : volumes) {
    const auto m = ex.total_spin_moments(2);
    v.volumes.push_back(ex.volume());
    v.tau2.push_back(m[2] - m[1] * m[1]);
    v.tau2_error.push_back(0.0);
  }
  return v;
}

VarianceSeries variance_series(const std::vector<std::vector<double>>& samples, const std::vector<int>& sizes,
                               const std::vector<long>& volumes, int blocks) {
  check_family(samples.size(), sizes);
  VarianceSeries v;
  v.sizes = sizes;
  v.volumes = volumes;
  for (const auto& s : samples) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(s.size()), 2);
    for (std::size_t i = 0; i < s.size(); ++i) {
      m(static_cast<Eigen::Index>(i), 0) = s[i];
      m(static_cast<Eigen::Index>(i), 1) = s[i] * s[i];
    }
    const auto js = JackknifeSet::from_samples(m, blocks).apply([](const Eigen::VectorXd& x) {
      Eigen::VectorXd o(1);
      o(0) = x(1) - x(0) * x(0);
      return o;
    });
    v.tau2.push_back(js.mean(0));
    v.tau2_error.push_back(js.error()(0));
  }
  return v;
}

BoxSumObservable::BoxSumObservable(const LatticeSpec& spec, std::vector<int> sizes)
    : spec_(spec), sizes_(std::move(sizes)) {
  spec_.validate();
  if (sizes_.empty()) throw std::invalid_argument("no box sizes");
  for (int n : sizes_)
    for (int a = 0; a < spec_.dimension; ++a)
      if (n < 1 || n > spec_.extent(a)) throw std::invalid_argument("box size does not fit the lattice");
}

std::vector<std::string> BoxSumObservable::columns() const {
  std::vector<std::string> c;
  for (int n : sizes_) c.push_back("n" + std::to_string(n));
  return c;
}

void BoxSumObservable::measure(const SpinConfiguration& config, std::span<double> out) {
  const int nx = spec_.extent(0);
  const int ny = spec_.dimension > 1 ? spec_.extent(1) : 1;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    const int n = sizes_[k];
    const int my = spec_.dimension > 1 ? n : 1, mz = spec_.dimension > 2 ? n : 1;
    long s = 0;
    for (int z = 0; z < mz; ++z)
      for (int y = 0; y < my; ++y)
        for (int x = 0; x < n; ++x) s += config[x + nx * (y + ny * z)];
    out[k] = static_cast<double>(s);
  }
}

std::vector<std::vector<double>> box_sum_samples(const SampleSet& samples, std::vector<int>& sizes,
                                                 std::vector<long>& volumes) {
  const auto& d = samples.get("box_sums");
  if (d.series.rows() == 0) throw std::invalid_argument("box sums were recorded without their series");
  std::vector<std::vector<double>> out;
  sizes.clear();
  volumes.clear();
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    const int n = std::stoi(d.columns[c].substr(1));
    sizes.push_back(n);
    long v = 1;
    for (int a = 0; a < samples.spec.dimension; ++a) v *= n;
    volumes.push_back(v);
    const auto col = d.series.col(static_cast<Eigen::Index>(c));
    out.emplace_back(col.data(), col.data() + col.size());
  }
  return out;
}

double box_variance(const std::function<double(const Coords&)>& F, int n, int dimension) {
  if (n < 1 || dimension < 1 || dimension > 3) throw std::invalid_argument("box_variance: bad size or dimension");
  const int m = n - 1;
  const int my = dimension > 1 ? m : 0, mz = dimension > 2 ? m : 0;
  CompensatedSum<> s;
  for (int z = -mz; z <= mz; ++z)
    for (int y = -my; y <= my; ++y)
      for (int x = -m; x <= m; ++x) {
        double count = n - std::abs(x);
        if (dimension > 1) count *= n - std::abs(y);
        if (dimension > 2) count *= n - std::abs(z);
        s.add(count * F({x, y, z}));
      }
  return s.value();
}

std::vector<double> standardize(const std::vector<double>& x) {
  if (x.size() < 2) throw std::invalid_argument("need at least two samples");
  const double m = mean(x), sd = std::sqrt(variance(x));
  if (!(sd > 0.0)) throw std::invalid_argument("samples have zero variance");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - m) / sd;
  return out;
}

Estimate small_z_exponent(const std::vector<double>& z, const std::vector<double>& fe) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] > 0.0 && fe[i] > 0.0) pts.emplace_back(z[i], fe[i]);
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 3) throw std::invalid_argument("small-z exponent needs at least 3 positive grid points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    x.push_back(pts[i].first * pts[i + 1].first);
    y.push_back(std::log(pts[i + 1].second / pts[i].second) / std::log(pts[i + 1].first / pts[i].first));
  }
  const LineFit f = fit_line(x, y);
  return {f.intercept, f.intercept_error};
}

ExponentEstimates exponent_estimates(const ProfileSeries& profiles, const VarianceSeries& variances, int dimension,
                                     std::optional<Estimate> eta_reference) {
  if (profiles.f.size() < 4 || variances.tau2.size() < 4) throw std::invalid_argument("exponent estimates need >= 4 volumes");
  double zmin = std::numeric_limits<double>::infinity(), zmax = 0.0;
  for (double z : profiles.z)
    if (z > 0.0) zmin = std::min(zmin, z), zmax = std::max(zmax, z);
  if (!(zmax / zmin >= std::pow(10.0, 1.5) - 1e-9)) throw std::invalid_argument("z grid must span 1.5 decades");
  ExponentEstimates e;
  e.dimension = dimension;
  std::size_t largest = 0;
  for (std::size_t v = 0; v < profiles.f.size(); ++v) {
    std::vector<double> z, fe;
    for (std::size_t i = 0; i < profiles.z.size(); ++i)
      if (profiles.reliable[v][i]) {
        z.push_back(profiles.z[i]);
        fe.push_back(profiles.f_even(v, i));
      }
    const Estimate pv = small_z_exponent(z, fe);
    e.p_per_volume.push_back(pv.value);
    if (profiles.volumes[v] >= profiles.volumes[largest]) {
      largest = v;
      e.p_hat = pv.value;
      e.p_error = pv.error;
    }
  }
  e.p_flag_below_one = e.p_hat < 1.0 - 3.0 * e.p_error;

  std::vector<double> lx, ly, sig;
  bool weighted = true;
  for (std::size_t v = 0; v < variances.tau2.size(); ++v) {
    if (!(variances.tau2[v] > 0.0)) throw std::invalid_argument("non-positive block variance");
    lx.push_back(std::log(variances.sizes[v]));
    ly.push_back(std::log(variances.tau2[v]));
    sig.push_back(variances.tau2_error[v] / variances.tau2[v]);
    if (!(sig.back() > 0.0)) weighted = false;
  }
  const LineFit f = weighted ? fit_line(lx, ly, sig) : fit_line(lx, ly);
  // log tau = (nu + 2 - eta)/2 log n
  e.tau_slope = 0.5 * f.slope;
  e.tau2_intercept = f.intercept;
  const double slope_err = std::max(f.slope_error, f.residual_slope_error);
  e.tau_slope_error = 0.5 * slope_err;
  e.eta_hat = dimension + 2.0 - f.slope;
  e.eta_error = slope_err;
  if (eta_reference) {
    e.eta_reference = eta_reference->value;
    const double s = std::hypot(e.eta_error, eta_reference->error);
    e.eta_discrepancy_sigma = s > 0.0 ? std::abs(e.eta_hat - eta_reference->value) / s
                                      : std::abs(e.eta_hat - eta_reference->value);
  }
  return e;
}

BgReport bg_check(double p, double eta, int nu, double p_error, double eta_error) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  BgReport r;
  r.lhs = 2.0 - eta;
  r.rhs = nu * (2.0 - p) / p;
  r.sigma = std::hypot(eta_error, 2.0 * nu / (p * p) * p_error);
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs + 3.0 * r.sigma + 1e-12;
  r.p_below_one = p < 1.0 - 3.0 * p_error;
  r.gaussian_endpoint = std::abs(p - 2.0) <= 3.0 * p_error + 1e-12;
  return r;
}

RadialTable RadialTable::from_profile(const RadialProfile& p) {
  RadialTable t;
  t.r = p.r;
  t.F = p.mean;
  t.multiplicity.assign(p.multiplicity.begin(), p.multiplicity.end());
  return t;
}

RadialTable RadialTable::synthetic(const std::function<double(double)>& F, int dimension, double r_max) {
  if (dimension < 1 || dimension > 3) throw std::invalid_argument("dimension must be 1..3");
  const int m = static_cast<int>(std::floor(r_max));
  std::map<long, double> count;
  const int my = dimension > 1 ? m : 0, mz = dimension > 2 ? m : 0;
  for (int z = -mz; z <= mz; ++z)
    for (int y = -my; y <= my; ++y)
      for (int x = -m; x <= m; ++x) {
        const long r2 = static_cast<long>(x) * x + static_cast<long>(y) * y + static_cast<long>(z) * z;
        if (static_cast<double>(r2) <= r_max * r_max) count[r2] += 1.0;
      }
  RadialTable t;
  for (const auto& [r2, c] : count) {
    const double r = std::sqrt(static_cast<double>(r2));
    t.r.push_back(r);
    t.F.push_back(F(r));
    t.multiplicity.push_back(c);
  }
  return t;
}

double RadialTable::G(double R) const {
  CompensatedSum<> s;
  for (std::size_t i = 0; i < r.size() && r[i] <= R + 1e-9; ++i) s.add(multiplicity[i] * F[i]);
  return s.value();
}

SandwichReport sandwich_check(const VarianceSeries& v, const RadialTable& F, int dimension, double max_spread,
                              const std::vector<double>& F_error) {
  SandwichReport rep;
  for (std::size_t i = 0; i < F.F.size(); ++i) {
    const double tol = F_error.empty() ? 0.0 : 3.0 * F_error[i];
    if (F.F[i] < -tol - 1e-15) rep.negative_F = true;
  }
  double best_spread = std::numeric_limits<double>::infinity();
  for (int k = 4; k <= 16; ++k) {
    const double c = k / 16.0;
    std::vector<double> ratio;
    bool ok = true;
    for (std::size_t i = 0; i < v.sizes.size() && ok; ++i) {
      const double R = c * v.sizes[i];
      if (R > F.max_radius() + 1e-9) {
        ok = false;
        break;
      }
      const double g = F.G(R);
      if (!(g > 0.0) || !(v.tau2[i] > 0.0)) {
        ok = false;
        break;
      }
      ratio.push_back(v.tau2[i] / (std::pow(v.sizes[i], dimension) * g));
    }
    if (!ok || ratio.empty()) continue;
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    const double spread = *hi / *lo;
    if (spread < best_spread) {
      best_spread = spread;
      rep.c1 = rep.c2 = c;
      rep.K1 = *lo;
      rep.K2 = *hi;
      rep.lower_ratio = rep.upper_ratio = ratio;
    }
  }
  if (!std::isfinite(best_spread)) {
    rep.note = "no c in [1/4, 1] keeps every window inside the correlation table";
    return rep;
  }
  rep.spread = best_spread;
  rep.feasible = !rep.negative_F && rep.spread <= max_spread;
  if (rep.negative_F) rep.note = "F has significantly negative values";
  else if (!rep.feasible) rep.note = "ratio spread exceeds the allowed factor";
  return rep;
}

TailReport tail_bound_check(const std::vector<double>& x, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("tail bound needs p > 1 (q = p/(p-1))");
  const double n = static_cast<double>(x.size());
  if (x.size() < 100) throw std::invalid_argument("tail bound needs at least 100 samples");
  const double m = mean(x), var = variance(x);
  if (std::abs(m) > 5.0 / std::sqrt(n) + 1e-12 || std::abs(var - 1.0) > 5.0 * std::sqrt(2.0 / n) + 1e-9)
    throw std::invalid_argument("samples are not standardized");
  TailReport r;
  r.p = p;
  r.q = p / (p - 1.0);
  std::vector<double> terms(x.size());
  for (int k = -30; k <= 30; ++k) {
    if (k == 0) continue;
    const double t = 0.1 * k;
    for (std::size_t i = 0; i < x.size(); ++i) terms[i] = t * x[i];
    const double log_mgf = log_sum_exp(terms) - std::log(n);
    if (log_mgf > 0.0) r.c_mgf = std::max(r.c_mgf, std::pow(p * log_mgf, 1.0 / p) / std::abs(t));
  }
  for (double xi : {1.0, 2.0, 3.0}) {
    const double P = static_cast<double>(std::count_if(x.begin(), x.end(), [&](double v) { return v > xi; })) / n;
    if (P <= 0.0) continue;
    if (P >= 1.0) {
      r.c_tail = std::numeric_limits<double>::infinity();
      continue;
    }
    r.c_tail = std::max(r.c_tail, xi / std::pow(-r.q * std::log(P), 1.0 / r.q));
  }
  r.c = std::max(r.c_mgf, r.c_tail);
  r.finite = std::isfinite(r.c);
  if (!r.finite) r.note = "no finite c at this resolution";
  return r;
}

}  // namespace critlab
